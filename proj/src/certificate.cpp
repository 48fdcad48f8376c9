#include "nlpoisson/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "nlpoisson/errors.hpp"
#include "nlpoisson/potential.hpp"

namespace nlpoisson {

namespace {

using Kind = expr::VarSpace::Kind;

struct PartialStats {
  double sup = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double lipschitz = 0.0;  // sup of the l1 gradient in (x, p, q)
  double lipschitz_r = 0.0;  // sup of the l1 gradient in r
  double diam = 0.0;        // max-norm diameter of the (x, p, q) ranges
  long samples = 0;
};

double range_of(const EBox& box, Kind kind) {
  switch (kind) {
    case Kind::X: return box.R;
    case Kind::P: return box.p_bound();
    case Kind::Q: return box.q_bound();
    case Kind::R: return box.r_bound();
  }
  return 0.0;
}

double halton(long index, int base) {
  double f = 1.0;
  double r = 0.0;
  long i = index;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

// Unit-cube sample points in [-1, 1]^d: a tensor lattice when it fits the
// budget, otherwise a Halton set plus the corners and the centre.
std::vector<std::vector<double>> sample_points(int d, int per_axis, long budget) {
  std::vector<std::vector<double>> pts;
  double total = std::pow(static_cast<double>(per_axis), d);
  if (total <= static_cast<double>(budget)) {
    const long count = static_cast<long>(total);
    for (long t = 0; t < count; ++t) {
      std::vector<double> z(static_cast<std::size_t>(d));
      long rest = t;
      for (int k = 0; k < d; ++k) {
        const long idx = rest % per_axis;
        rest /= per_axis;
        z[static_cast<std::size_t>(k)] = per_axis == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(idx) / (per_axis - 1);
      }
      pts.push_back(std::move(z));
    }
    return pts;
  }
  if (d > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("bound_constants: too many variables");
  pts.emplace_back(static_cast<std::size_t>(d), 0.0);
  if (d <= 14) {
    for (long c = 0; c < (1L << d); ++c) {
      std::vector<double> z(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) z[static_cast<std::size_t>(k)] = (c >> k & 1) ? 1.0 : -1.0;
      pts.push_back(std::move(z));
    }
  }
  for (long t = 1; t <= budget; ++t) {
    std::vector<double> z(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) z[static_cast<std::size_t>(k)] = 2.0 * halton(t, kPrimes[k]) - 1.0;
    pts.push_back(std::move(z));
  }
  return pts;
}

PartialStats partial_stats(const expr::Expr& g, const expr::VarSpace& vs, const EBox& box,
                           const BoundOptions& options) {
  PartialStats st;
  const std::vector<int> vars = expr::variables(g);
  if (vars.empty()) {
    st.sup = std::abs(g->value);
    st.lo = st.hi = g->value;
    st.samples = 1;
    return st;
  }
  const int d = static_cast<int>(vars.size());
  std::vector<double> range(static_cast<std::size_t>(d));
  std::vector<Kind> kinds(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    kinds[static_cast<std::size_t>(k)] = vs.kind(vars[static_cast<std::size_t>(k)]);
    range[static_cast<std::size_t>(k)] = range_of(box, kinds[static_cast<std::size_t>(k)]);
    if (kinds[static_cast<std::size_t>(k)] != Kind::R) st.diam = std::max(st.diam, 2.0 * range[static_cast<std::size_t>(k)]);
  }
  // Second partials, symbolic where the tree allows it.
  std::vector<expr::Compiled> grad;
  bool symbolic = true;
  try {
    for (int v : vars) grad.emplace_back(expr::diff(g, v), vs);
  } catch (const DomainError&) {
    symbolic = false;
    grad.clear();
  }
  const expr::Compiled value(g, vs);
  const auto pts = sample_points(d, options.samples_per_axis, options.budget);
  const long count = static_cast<long>(pts.size());

  double sup = 0.0, lo = INFINITY, hi = -INFINITY, lip = 0.0, lip_r = 0.0;
  std::string error;
  bool failed = false;
#pragma omp parallel reduction(max : sup, hi, lip, lip_r) reduction(min : lo)
  {
    std::vector<double> point(static_cast<std::size_t>(vs.size()), 0.0);
#pragma omp for schedule(static)
    for (long t = 0; t < count; ++t) {
      const auto& z = pts[static_cast<std::size_t>(t)];
      double x2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double v = z[static_cast<std::size_t>(k)] * range[static_cast<std::size_t>(k)];
        point[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])] = v;
        if (kinds[static_cast<std::size_t>(k)] == Kind::X) x2 += v * v;
      }
      // Pull lattice points in the cube's corners back onto the sphere.
      if (x2 > box.R * box.R) {
        const double s = box.R / std::sqrt(x2);
        for (int k = 0; k < d; ++k) {
          if (kinds[static_cast<std::size_t>(k)] == Kind::X) point[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])] *= s;
        }
      }
      try {
        const double gv = value(point);
        sup = std::max(sup, std::abs(gv));
        lo = std::min(lo, gv);
        hi = std::max(hi, gv);
        double l1 = 0.0, l1r = 0.0;
        for (int k = 0; k < d; ++k) {
          double dk;
          if (symbolic) {
            dk = grad[static_cast<std::size_t>(k)](point);
          } else {
            const std::size_t slot = static_cast<std::size_t>(vars[static_cast<std::size_t>(k)]);
            const double h = 1e-6 * std::max(range[static_cast<std::size_t>(k)], 1e-12);
            const double keep = point[slot];
            point[slot] = keep + h;
            const double up = value(point);
            point[slot] = keep - h;
            const double dn = value(point);
            point[slot] = keep;
            dk = (up - dn) / (2 * h);
          }
          (kinds[static_cast<std::size_t>(k)] == Kind::R ? l1r : l1) += std::abs(dk);
        }
        lip = std::max(lip, l1);
        lip_r = std::max(lip_r, l1r);
      } catch (const DomainError& e) {
#pragma omp critical(nlpoisson_bound_error)
        if (!failed) {
          failed = true;
          error = e.what();
        }
      }
    }
  }
  if (failed) throw DomainError("partial '" + expr::print(g, vs) + "' inside E(R, gamma): " + error);
  st.sup = sup;
  st.lo = lo;
  st.hi = hi;
  st.lipschitz = lip;
  st.lipschitz_r = lip_r;
  st.samples = count;
  return st;
}

// |g(z) - g(z')| <= min(L |z - z'|, osc) gives
// H_alpha <= min(L diam^(1-alpha), L^alpha osc^(1-alpha)).
double hoelder_bound(const PartialStats& st, double alpha) {
  if (st.lipschitz == 0.0) return 0.0;
  const double osc = st.hi - st.lo;
  const double by_diam = st.lipschitz * std::pow(st.diam, 1.0 - alpha);
  const double by_osc = std::pow(st.lipschitz, alpha) * std::pow(osc, 1.0 - alpha);
  return std::min(by_diam, by_osc);
}

}  // namespace

ConstantTable bound_constants(const NonlinearitySpec& spec, const EBox& box,
                              const BoundOptions& options) {
  if (options.samples_per_axis < 3) throw std::invalid_argument("bound_constants: need at least 3 samples per axis");
  if (!(box.R > 0) || !(box.gamma > 0)) throw std::invalid_argument("bound_constants: R and gamma must be positive");
  ConstantTable t;
  const expr::VarSpace& vs = spec.vars;
  for (int i = 0; i < spec.components; ++i) {
    t.a0 = std::max(t.a0, std::abs(spec.at_zero(i)));
    for (int v : expr::variables(spec.asts[static_cast<std::size_t>(i)])) {
      const expr::Expr g = diff(spec, i, v);
      if (expr::is_const(g, 0.0)) continue;
      const PartialStats st = partial_stats(g, vs, box, options);
      t.samples += st.samples;
      const double h = hoelder_bound(st, options.alpha);
      auto take = [&](double& sup, double& ha, double& h1) {
        sup = std::max(sup, st.sup);
        ha = std::max(ha, h);
        h1 = std::max(h1, st.lipschitz_r);
      };
      switch (vs.kind(v)) {
        case Kind::P: take(t.A, t.HA, t.H1A); break;
        case Kind::Q: take(t.B, t.HB, t.H1B); break;
        case Kind::R: take(t.C, t.HC, t.H1C); break;
        case Kind::X: take(t.D, t.HD, t.H1D); break;
      }
    }
  }
  return t;
}

double aggregation_constant(int n, int N) {
  return (1.0 + n * n) * (9.0 * n * n / 2.0) * N;
}

DeltaEta delta_eta(const ConstantTable& t, double c_op, double K, const EBox& box, double alpha) {
  const double N = box.components;
  const double n = box.dim;
  const double g = box.gamma;
  const double R = box.R;
  const double holder_weight =
      std::pow(2.0 * R, alpha) * (1.0 + 2.0 * N * std::pow(3.0 * n * R, alpha) * std::pow(g, alpha) + 2.0 * N * g);
  auto family = [&](double sup, double ha, double h1) {
    return sup + holder_weight * ha + 2.0 * N * g * h1;
  };
  DeltaEta out;
  out.delta_A = family(t.A, t.HA, t.H1A);
  out.delta_B = family(t.B, t.HB, t.H1B);
  out.delta_C = family(t.C, t.HC, t.H1C);
  out.delta_D = family(t.D, t.HD, t.H1D);
  out.delta = c_op * K * (R * R * out.delta_A + R * out.delta_B + out.delta_C);
  out.eta = c_op * K * (t.a0 + R * out.delta_D + g * out.delta);
  return out;
}

double operator_constant(int n, double alpha) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, double> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(n, alpha);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const auto grid = make_grid(BallDomain(n, 1.0), 16);
  const double c = operator_norm_probe(8, grid, alpha).c_hat;
  cache[key] = c;
  return c;
}

Search parse_search(const std::string& text) {
  if (text == "auto") return Search::Auto;
  if (text == "none") return Search::None;
  if (text == "gamma") return Search::Gamma;
  if (text == "R") return Search::Radius;
  if (text == "both") return Search::Both;
  throw std::invalid_argument("unknown search '" + text + "' (expected auto, none, gamma, R or both)");
}

std::string to_string(Search search) {
  switch (search) {
    case Search::Auto: return "auto";
    case Search::None: return "none";
    case Search::Gamma: return "gamma";
    case Search::Radius: return "R";
    case Search::Both: return "both";
  }
  return "?";
}

namespace {

struct Prepared {
  NonlinearitySpec work;
  double c_op = 0;
  double K = 0;
  HypothesisReport hypothesis;
  Search search = Search::None;
  double gamma0 = 0;
};

Prepared prepare(const NonlinearitySpec& spec, Mode mode, const CertifyOptions& options) {
  Prepared p;
  if (mode == Mode::Thm12) {
    std::vector<double> c0 = options.c0;
    std::vector<double> c1 = options.c1;
    if (c0.empty()) c0.assign(static_cast<std::size_t>(spec.components), 0.0);
    if (c1.empty()) c1.assign(static_cast<std::size_t>(spec.components * spec.dim), 0.0);
    const bool trivial = std::all_of(c0.begin(), c0.end(), [](double v) { return v == 0.0; }) &&
                         std::all_of(c1.begin(), c1.end(), [](double v) { return v == 0.0; });
    p.work = trivial ? spec : shift_spec(spec, c0, c1);
  } else {
    if (!options.c0.empty() || !options.c1.empty()) {
      throw std::invalid_argument("initial values c0, c1 apply to thm12 only");
    }
    p.work = spec;
  }
  p.c_op = options.c_op > 0 ? options.c_op : operator_constant(spec.dim, options.alpha);
  p.K = aggregation_constant(spec.dim, spec.components);
  p.hypothesis = hypothesis_check(p.work, mode, 3.0 / (10.0 * p.c_op * p.K));
  p.search = options.search;
  if (p.search == Search::Auto) p.search = mode == Mode::Thm13 ? Search::Gamma : Search::Radius;
  p.gamma0 = options.gamma;
  if (mode != Mode::Thm13) {
    double a0 = 0.0;
    for (int i = 0; i < p.work.components; ++i) a0 = std::max(a0, std::abs(p.work.at_zero(i)));
    p.gamma0 = std::max(options.gamma, 8.0 * p.c_op * p.K * a0);
  }
  return p;
}

ContractionCertificate evaluate(const Prepared& p, Mode mode, double R, double gamma,
                                const CertifyOptions& options) {
  ContractionCertificate c;
  c.mode = mode;
  c.box = EBox{p.work.dim, p.work.components, R, gamma};
  c.c_op = p.c_op;
  c.K = p.K;
  c.alpha = options.alpha;
  c.hypothesis = p.hypothesis;
  c.spec_text = print_spec(p.work);
  BoundOptions bo;
  bo.samples_per_axis = options.samples_per_axis;
  bo.alpha = options.alpha;
  try {
    c.table = bound_constants(p.work, c.box, bo);
  } catch (const DomainError& e) {
    // a is not evaluable somewhere in E(R, gamma); a smaller box may still be.
    c.domain_error = e.what();
    c.bounds.delta = c.bounds.eta = INFINITY;
    c.binding = p.hypothesis.pass ? "domain" : "hypothesis";
    return c;
  }
  c.bounds = delta_eta(c.table, c.c_op, c.K, c.box, c.alpha);
  const bool delta_ok = c.bounds.delta < 1.0;
  const bool eta_ok = c.bounds.eta < gamma / 2.0;
  c.admissible = p.hypothesis.pass && delta_ok && eta_ok;
  c.binding = !p.hypothesis.pass ? "hypothesis" : !delta_ok ? "delta" : !eta_ok ? "eta" : "none";
  return c;
}

std::vector<double> halvings(double start, int steps) {
  std::vector<double> v;
  for (int j = 0; j < steps; ++j) v.push_back(std::ldexp(start, -j));
  return v;
}

void lattice(const Prepared& p, const CertifyOptions& options, std::vector<double>& Rs,
             std::vector<double>& gammas) {
  const int steps = std::max(1, options.max_steps);
  const bool sweep_R = p.search == Search::Radius || p.search == Search::Both;
  const bool sweep_g = p.search == Search::Gamma || p.search == Search::Both;
  Rs = sweep_R ? halvings(options.R, steps) : std::vector<double>{options.R};
  gammas = sweep_g ? halvings(p.gamma0, steps) : std::vector<double>{p.gamma0};
}

}  // namespace

ContractionCertificate certify(const NonlinearitySpec& spec, Mode mode, const EBox& box,
                               const CertifyOptions& options) {
  CertifyOptions fixed = options;
  fixed.search = Search::None;
  const Prepared p = prepare(spec, mode, fixed);
  ContractionCertificate c = evaluate(p, mode, box.R, box.gamma, fixed);
  c.steps = 1;
  return c;
}

ContractionCertificate search_admissible(const NonlinearitySpec& spec, Mode mode,
                                         const CertifyOptions& options) {
  const Prepared p = prepare(spec, mode, options);
  std::vector<double> Rs, gammas;
  lattice(p, options, Rs, gammas);
  ContractionCertificate last;
  int steps = 0;
  for (double R : Rs) {
    for (double g : gammas) {
      last = evaluate(p, mode, R, g, options);
      last.steps = ++steps;
      if (last.admissible || !p.hypothesis.pass) return last;
    }
  }
  return last;
}

std::vector<SweepRow> sweep(const NonlinearitySpec& spec, Mode mode, const CertifyOptions& options) {
  const Prepared p = prepare(spec, mode, options);
  std::vector<double> Rs, gammas;
  lattice(p, options, Rs, gammas);
  std::vector<SweepRow> rows;
  for (double R : Rs) {
    for (double g : gammas) {
      const ContractionCertificate c = evaluate(p, mode, R, g, options);
      rows.push_back({R, g, c.bounds.delta, c.bounds.eta, c.admissible, c.binding});
    }
  }
  return rows;
}

std::string serialize(const ContractionCertificate& c) {
  std::ostringstream out;
  auto kv = [&](const char* key, double v) { out << key << " = " << format_double(v) << '\n'; };
  out << "mode = " << to_string(c.mode) << '\n';
  out << "label = " << c.table.label << '\n';
  kv("n", c.box.dim);
  kv("N", c.box.components);
  kv("R", c.box.R);
  kv("gamma", c.box.gamma);
  kv("alpha", c.alpha);
  kv("p_bound", c.box.p_bound());
  kv("q_bound", c.box.q_bound());
  kv("r_bound", c.box.r_bound());
  kv("A", c.table.A);
  kv("B", c.table.B);
  kv("C", c.table.C);
  kv("D", c.table.D);
  kv("H_alpha_A", c.table.HA);
  kv("H_alpha_B", c.table.HB);
  kv("H_alpha_C", c.table.HC);
  kv("H_alpha_D", c.table.HD);
  kv("H1_A", c.table.H1A);
  kv("H1_B", c.table.H1B);
  kv("H1_C", c.table.H1C);
  kv("H1_D", c.table.H1D);
  kv("abs_a0", c.table.a0);
  kv("samples", static_cast<double>(c.table.samples));
  kv("C_op", c.c_op);
  kv("K", c.K);
  kv("delta_A", c.bounds.delta_A);
  kv("delta_B", c.bounds.delta_B);
  kv("delta_C", c.bounds.delta_C);
  kv("delta_D", c.bounds.delta_D);
  kv("delta", c.bounds.delta);
  kv("eta", c.bounds.eta);
  kv("eta_limit", c.box.gamma / 2.0);
  kv("sweep_steps", c.steps);
  out << "hypothesis = " << (c.hypothesis.pass ? "pass" : "fail") << '\n';
  for (const auto& f : c.hypothesis.failures) out << "hypothesis: " << f << '\n';
  if (!c.domain_error.empty()) out << "domain: " << c.domain_error << '\n';
  if (c.mode == Mode::Thm11) kv("thm11_threshold", c.hypothesis.threshold);
  out << "verdict = " << (c.admissible ? "admissible" : "not_admissible") << '\n';
  out << "binding_constraint = " << c.binding << '\n';
  std::istringstream lines(c.spec_text);
  for (std::string line; std::getline(lines, line);) out << "system: " << line << '\n';
  return out.str();
}

}  // namespace nlpoisson
