#include "nlpoisson/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nlpoisson/errors.hpp"

namespace nlpoisson::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_system_key(std::string_view k) { return k.size() >= 2 && k[0] == 'a' && all_digits(k.substr(1)); }
bool is_metric_key(std::string_view k) { return k.size() == 3 && k[0] == 'g' && all_digits(k.substr(1)); }
// hJ_KL
bool is_seed_key(std::string_view k) {
  const auto us = k.find('_');
  return k.size() >= 4 && k[0] == 'h' && us != std::string_view::npos && all_digits(k.substr(1, us - 1)) &&
         k.size() - us - 1 == 2 && all_digits(k.substr(us + 1));
}

bool known(const std::string& key) {
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end() || is_seed_key(key);
}

bool truthy(const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

void matrices(std::ostream& out, const char* key, const std::vector<Matrix3>& ms, int n) {
  for (std::size_t c = 0; c < ms.size(); ++c) {
    out << key << "_u" << c + 1 << " =";
    for (int k = 0; k < n; ++k) {
      out << (k ? " ;" : "");
      for (int l = 0; l < n; ++l) out << ' ' << format_double(ms[c][k][l]);
    }
    out << '\n';
  }
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "preset", "mode",  "n",      "R",         "gamma",    "alpha",   "m",       "seed",
      "rng_seed", "c0",  "c1",     "tol",       "max_iter", "min_iter", "output", "force",
      "sweep_steps", "search", "samples", "c_op", "lambda", "c",        "H"};
  return keys;
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double RunConfig::number(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size()) {
    throw ParseError(value_lines.count(key) ? value_lines.at(key) : 0, 1,
                     "'" + key + "' expects a number, got '" + it->second + "'");
  }
  return v;
}

int RunConfig::integer(const std::string& key, int fallback) const {
  const double v = number(key, fallback);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParseError(value_lines.count(key) ? value_lines.at(key) : 0, 1, "'" + key + "' expects an integer");
  }
  return static_cast<int>(v);
}

std::vector<double> RunConfig::list(const std::string& key) const {
  std::vector<double> out;
  const auto it = values.find(key);
  if (it == values.end()) return out;
  std::string item;
  std::istringstream in(it->second);
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size()) {
      throw ParseError(value_lines.count(key) ? value_lines.at(key) : 0, 1,
                       "'" + key + "' expects comma-separated numbers, got '" + it->second + "'");
    }
    out.push_back(v);
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string bare = line;
    if (const auto hash = bare.find('#'); hash != std::string::npos) bare.erase(hash);
    const std::size_t first = bare.find_first_not_of(" \t");
    auto keep_line = [&](std::string& sink, bool on) {
      // one line per config line keeps the numbering of the original
      sink += on ? line : std::string();
      sink += '\n';
    };
    if (first == std::string::npos) {
      keep_line(cfg.system_source, false);
      keep_line(cfg.metric_source, false);
      continue;
    }
    const auto eq = bare.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, static_cast<int>(first) + 1, "expected 'key = value'");
    const std::string key = trim(std::string_view(bare).substr(0, eq));
    if (key.empty()) throw ParseError(line_no, static_cast<int>(first) + 1, "missing key before '='");
    const bool system = is_system_key(key);
    const bool metric = is_metric_key(key);
    keep_line(cfg.system_source, system);
    keep_line(cfg.metric_source, metric);
    if (system || metric) continue;
    if (!known(key)) throw ParseError(line_no, static_cast<int>(first) + 1, "unknown key '" + key + "'");
    if (cfg.has(key)) throw ParseError(line_no, static_cast<int>(first) + 1, "'" + key + "' set twice");
    const std::string value = trim(std::string_view(bare).substr(eq + 1));
    if (value.empty()) throw ParseError(line_no, static_cast<int>(eq) + 2, "missing value for '" + key + "'");
    cfg.values[key] = value;
    cfg.value_lines[key] = line_no;
  }
  return cfg;
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ParseError(0, 1, "override '" + std::string(assignment) + "' is not key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!known(key)) throw ParseError(0, 1, "unknown key '" + key + "' in override");
  if (value.empty()) throw ParseError(0, static_cast<int>(eq) + 2, "missing value for '" + key + "'");
  config.values[key] = value;
  config.value_lines[key] = 0;
}

Problem resolve(const RunConfig& config) {
  Problem pr;
  pr.dim = config.integer("n", 2);
  if (pr.dim != 2 && pr.dim != 3) throw std::invalid_argument("n must be 2 or 3");
  const int n = pr.dim;
  const bool inline_system = config.system_source.find_first_not_of('\n') != std::string::npos;
  if (config.has("preset") == inline_system) {
    throw std::invalid_argument("give exactly one of 'preset = name' or inline 'aI = expression' lines");
  }
  const bool has_metric = config.metric_source.find_first_not_of('\n') != std::string::npos;
  std::vector<double> c0 = config.list("c0");
  std::vector<double> c1 = config.list("c1");
  if (inline_system) {
    ProblemPreset p;
    p.name = "inline";
    p.description = "inline system";
    p.spec = parse_nonlinearity(config.system_source, n);
    p.mode = parse_mode(config.get("mode", "thm13"));
    p.search = p.mode == Mode::Thm13 ? Search::Gamma : Search::None;
    if (has_metric) p.metric = parse_metric(config.metric_source, n, "config metric");
    pr.preset = std::move(p);
  } else {
    PresetParams pp;
    pp.lambda = config.number("lambda", pp.lambda);
    pp.c = config.number("c", pp.c);
    pp.H = config.get("H", pp.H);
    pp.c0 = c0;
    pp.c1 = c1;
    const std::string name = config.get("preset", "");
    // target metrics of the harmonic-map presets share the domain dimension
    if (has_metric) pp.metric = parse_metric(config.metric_source, n, "config metric");
    pr.preset = make_preset(name, n, pp);
    if (config.has("mode")) pr.preset.mode = parse_mode(config.get("mode", ""));
  }
  ProblemPreset& p = pr.preset;
  const int N = p.spec.components;
  if (p.mode == Mode::Thm12) {
    if (!c0.empty()) p.c0 = c0;
    if (!c1.empty()) p.c1 = c1;
    if (p.c0.empty()) p.c0.assign(static_cast<std::size_t>(N), 0.0);
    if (p.c1.empty()) p.c1.assign(static_cast<std::size_t>(N * n), 0.0);
    if (static_cast<int>(p.c0.size()) != N) throw std::invalid_argument("c0 needs " + std::to_string(N) + " entries");
    if (static_cast<int>(p.c1.size()) != N * n) {
      throw std::invalid_argument("c1 needs " + std::to_string(N * n) + " entries (N x n, row-major)");
    }
  } else {
    if (!c0.empty() || !c1.empty()) throw std::invalid_argument("c0 and c1 apply to mode thm12 only");
    p.c0.clear();
    p.c1.clear();
  }

  CertifyOptions& o = pr.certify;
  o.R = config.number("R", p.R);
  o.gamma = config.number("gamma", p.gamma);
  o.alpha = config.number("alpha", 0.5);
  o.c_op = config.number("c_op", 0.0);
  o.samples_per_axis = config.integer("samples", o.samples_per_axis);
  o.max_steps = config.integer("sweep_steps", o.max_steps);
  o.c0 = p.c0;
  o.c1 = p.c1;
  if (!(o.R > 0) || !(o.gamma > 0)) throw std::invalid_argument("R and gamma must be positive");
  if (!(o.alpha > 0 && o.alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (config.has("search")) {
    o.search = parse_search(config.get("search", ""));
  } else {
    // A preset's sweep yields to a parameter the config pins down.
    Search s = p.search;
    if (s == Search::Auto) s = p.mode == Mode::Thm13 ? Search::Gamma : Search::Radius;
    const bool pin_R = config.has("R");
    const bool pin_g = config.has("gamma");
    if (s == Search::Both) s = pin_R && pin_g ? Search::None : pin_R ? Search::Gamma : pin_g ? Search::Radius : s;
    if ((s == Search::Radius && pin_R) || (s == Search::Gamma && pin_g)) s = Search::None;
    o.search = s;
  }
  return pr;
}

HarmonicSeed build_seed(const RunConfig& config, const Problem& problem, double gamma0) {
  const int n = problem.dim;
  const int N = problem.preset.spec.components;
  bool explicit_seed = false;
  std::vector<Matrix3> a(static_cast<std::size_t>(N), Matrix3{});
  for (const auto& [key, value] : config.values) {
    if (!is_seed_key(key)) continue;
    explicit_seed = true;
    const auto us = key.find('_');
    const int j = std::stoi(key.substr(1, us - 1)) - 1;
    const int k = key[us + 1] - '1';
    const int l = key[us + 2] - '1';
    if (j < 0 || j >= N || k < 0 || k >= n || l < 0 || l >= n) {
      throw std::invalid_argument("seed coefficient " + key + " is out of range for n = " + std::to_string(n) +
                                  ", N = " + std::to_string(N));
    }
    const double v = config.number(key, 0.0);
    a[static_cast<std::size_t>(j)][k][l] = v;
    a[static_cast<std::size_t>(j)][l][k] = v;
  }
  const std::string kind = config.get("seed", explicit_seed ? "explicit" : problem.preset.seed);
  if (explicit_seed && kind != "explicit") throw std::invalid_argument("hJ_KL coefficients need seed = explicit");
  if (kind == "default") {
    a = default_seed_coefficients(n, N, gamma0);
  } else if (kind == "random") {
    a = random_seed_coefficients(n, N, gamma0, static_cast<std::uint64_t>(config.integer("rng_seed", 0)));
  } else if (kind == "zero") {
    a.assign(static_cast<std::size_t>(N), Matrix3{});
  } else if (kind != "explicit") {
    throw std::invalid_argument("seed must be default, random, zero or explicit, got '" + kind + "'");
  }
  return make_seed(problem.preset.mode, gamma0, n, N, a, problem.preset.c0, problem.preset.c1);
}

void write_history_csv(std::ostream& out, const std::vector<double>& history) {
  out << "iter,delta_norm2,ratio\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << i + 1 << ',' << format_double(history[i]) << ',';
    out << (i > 0 && history[i - 1] > 0 ? format_double(history[i] / history[i - 1]) : std::string("nan")) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "R,gamma,delta,eta,verdict,binding_constraint\n";
  for (const SweepRow& r : rows) {
    out << format_double(r.R) << ',' << format_double(r.gamma) << ',' << format_double(r.delta) << ','
        << format_double(r.eta) << ',' << (r.admissible ? "admissible" : "not_admissible") << ',' << r.binding
        << '\n';
  }
}

std::string render_report(const RunConfig& config, const Problem& problem, const ContractionCertificate& cert,
                          const SolveReport* rep, const std::string& status) {
  const ProblemPreset& p = problem.preset;
  const int n = problem.dim;
  std::ostringstream out;
  out << "[CONFIG]\n";
  out << "preset = " << p.name << '\n';
  out << "mode = " << to_string(p.mode) << '\n';
  out << "n = " << n << '\n';
  out << "N = " << p.spec.components << '\n';
  out << "search = " << to_string(problem.certify.search) << '\n';
  out << "R_start = " << format_double(problem.certify.R) << '\n';
  out << "gamma_start = " << format_double(problem.certify.gamma) << '\n';
  out << "alpha = " << format_double(problem.certify.alpha) << '\n';
  out << "m = " << config.integer("m", 32) << '\n';
  out << "seed = " << config.get("seed", p.seed) << '\n';
  out << "rng_seed = " << config.integer("rng_seed", 0) << '\n';
  if (p.mode == Mode::Thm12) {
    out << "c0 = " << join(p.c0) << '\n';
    out << "c1 = " << join(p.c1) << '\n';
  }
  out << "force = " << (truthy(config.get("force", "false")) ? "true" : "false") << '\n';
  std::istringstream system(print_spec(p.spec));
  for (std::string line; std::getline(system, line);) out << "system: " << line << '\n';
  out << "\n[CERTIFICATE]\n" << serialize(cert);
  out << "\n[ITERATION]\n";
  out << "status = " << status << '\n';
  if (rep) {
    out << "converged = " << (rep->converged ? "true" : "false") << '\n';
    out << "iterations = " << rep->iterations << '\n';
    out << "rho_hat = " << format_double(rep->rho_hat) << '\n';
    out << "final_delta_norm2 = " << format_double(rep->history.empty() ? 0.0 : rep->history.back()) << '\n';
    out << "gamma0 = " << format_double(rep->gamma0) << '\n';
    out << "R = " << format_double(rep->R) << '\n';
  }
  out << "\n[SOLUTION]\n";
  if (rep && rep->solution) {
    const GridField& u = *rep->solution;
    out << "nodes = " << u.size() << '\n';
    out << "final_residual = " << format_double(rep->final_residual) << '\n';
    if (p.metric) out << "laplace_beltrami_residual = " << format_double(laplace_beltrami_residual(*p.metric, u)) << '\n';
    out << "stencil_tol = " << format_double(rep->stencil_tol) << '\n';
    for (int c = 0; c < u.components(); ++c) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < u.size(); ++i) {
        lo = std::min(lo, u.at(i, c));
        hi = std::max(hi, u.at(i, c));
      }
      out << "min_u" << c + 1 << " = " << format_double(lo) << '\n';
      out << "max_u" << c + 1 << " = " << format_double(hi) << '\n';
      out << "value_at_origin_u" << c + 1 << " = " << format_double(rep->value_at_origin[static_cast<std::size_t>(c)])
          << '\n';
      out << "gradient_at_origin_u" << c + 1 << " =";
      for (int k = 0; k < n; ++k) out << ' ' << format_double(rep->gradient_at_origin[static_cast<std::size_t>(c * n + k)]);
      out << '\n';
    }
    matrices(out, "hessian_at_origin", rep->hessian_at_origin, n);
    matrices(out, "hessian_stencil", rep->hessian_stencil, n);
  }
  out << "\n[RADIALITY]\n";
  if (rep && rep->solution) {
    out << "verdict = " << to_string(rep->radiality.verdict) << '\n';
    out << "deviation = " << format_double(rep->radiality.deviation) << '\n';
    out << "tolerance = " << format_double(10.0 * rep->stencil_tol) << '\n';
    out << "witness = " << rep->radiality.witness << '\n';
  }
  return out.str();
}

namespace {

fs::path output_dir(const RunConfig& config) {
  fs::path dir = config.get("output", "out");
  fs::create_directories(dir);
  return dir;
}

ContractionCertificate certify_problem(const Problem& pr) {
  return search_admissible(pr.preset.spec, pr.preset.mode, pr.certify);
}

void summary(std::ostream& out, const ContractionCertificate& c) {
  out << (c.admissible ? "admissible" : "not_admissible") << " at R = " << format_double(c.box.R)
      << ", gamma = " << format_double(c.box.gamma) << " (delta = " << format_double(c.bounds.delta)
      << ", eta = " << format_double(c.bounds.eta) << ", binding: " << c.binding << ")\n";
  for (const auto& f : c.hypothesis.failures) out << "hypothesis: " << f << '\n';
}

}  // namespace

int run_certify(const RunConfig& config, std::ostream& out, std::ostream&) {
  const Problem pr = resolve(config);
  const ContractionCertificate cert = certify_problem(pr);
  write_file(output_dir(config) / "certificate.txt", serialize(cert));
  summary(out, cert);
  return cert.admissible ? Ok : NotAdmissible;
}

int run_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const Problem pr = resolve(config);
  const fs::path dir = output_dir(config);
  const ContractionCertificate cert = certify_problem(pr);
  write_file(dir / "certificate.txt", serialize(cert));
  summary(out, cert);
  SolveOptions so;
  so.resolution = config.integer("m", 32);
  so.tol = config.number("tol", 0.0);
  so.max_iter = config.integer("max_iter", so.max_iter);
  so.min_iter = config.integer("min_iter", so.min_iter);
  so.force = truthy(config.get("force", "false"));
  so.alpha = pr.certify.alpha;
  if (!cert.admissible && !so.force) {
    write_file(dir / "report.txt", render_report(config, pr, cert, nullptr, "refused"));
    err << "solve refused: the certificate is not admissible (binding constraint: " << cert.binding
        << "); set force = true to iterate anyway\n";
    return Refused;
  }
  if (!cert.admissible) err << "warning: iterating without an admissible certificate (force)\n";
  const HarmonicSeed seed = build_seed(config, pr, cert.box.gamma);
  SolveReport rep;
  try {
    rep = solve(pr.preset.spec, pr.preset.mode, seed, cert, so);
  } catch (const DivergenceError& e) {
    std::ostringstream h;
    write_history_csv(h, e.history());
    write_file(dir / "history.csv", h.str());
    SolveReport partial;
    partial.certificate = cert;
    partial.history = e.history();
    partial.iterations = static_cast<int>(e.history().size());
    partial.gamma0 = cert.box.gamma;
    partial.R = cert.box.R;
    write_file(dir / "report.txt", render_report(config, pr, cert, &partial, "diverged"));
    err << "diverged: " << e.what() << '\n';
    return Diverged;
  }
  std::ostringstream h, s;
  write_history_csv(h, rep.history);
  write_csv(s, *rep.solution);
  write_file(dir / "history.csv", h.str());
  write_file(dir / "solution.csv", s.str());
  write_file(dir / "report.txt", render_report(config, pr, cert, &rep, rep.converged ? "converged" : "max_iter"));
  out << (rep.converged ? "converged" : "not converged") << " after " << rep.iterations
      << " iterations (rho_hat = " << format_double(rep.rho_hat) << ", residual = " << format_double(rep.final_residual)
      << ", radiality: " << to_string(rep.radiality.verdict) << ")\n";
  if (!rep.converged) {
    err << "no convergence within max_iter = " << so.max_iter << '\n';
    return Diverged;
  }
  return Ok;
}

int run_sweep(const RunConfig& config, std::ostream& out, std::ostream&) {
  Problem pr = resolve(config);
  if (!config.has("search") && pr.certify.search == Search::None) {
    pr.certify.search = pr.preset.mode == Mode::Thm13 ? Search::Gamma : Search::Radius;
  }
  const auto rows = sweep(pr.preset.spec, pr.preset.mode, pr.certify);
  std::ostringstream s;
  write_sweep_csv(s, rows);
  write_file(output_dir(config) / "sweep.csv", s.str());
  const auto admissible = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.admissible; });
  out << rows.size() << " sweep points, " << admissible << " admissible\n";
  return Ok;
}

int run_presets(int n, std::ostream& out) {
  for (const ProblemPreset& p : preset_catalog(n)) {
    out << p.name << " [" << to_string(p.mode) << "] " << p.description << '\n';
    std::istringstream system(print_spec(p.spec));
    for (std::string line; std::getline(system, line);) out << "    " << line << '\n';
  }
  return Ok;
}

int run(const std::string& verb, std::string_view config_text, const std::vector<std::string>& overrides,
        std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = parse_config(config_text);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (verb == "certify") return run_certify(cfg, out, err);
    if (verb == "solve") return run_solve(cfg, out, err);
    if (verb == "sweep") return run_sweep(cfg, out, err);
    if (verb == "presets") return run_presets(cfg.integer("n", 2), out);
    err << "unknown verb '" << verb << "'\n";
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "evaluation error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return Usage;
}

}  // namespace nlpoisson::cli
