#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nlpoisson/applications.hpp"
#include "nlpoisson/cli.hpp"
#include "nlpoisson/errors.hpp"

namespace py = pybind11;
using namespace nlpoisson;

namespace {

py::dict certificate_dict(const ContractionCertificate& c) {
  py::dict d;
  d["admissible"] = c.admissible;
  d["mode"] = to_string(c.mode);
  d["R"] = c.box.R;
  d["gamma"] = c.box.gamma;
  d["delta"] = c.bounds.delta;
  d["eta"] = c.bounds.eta;
  d["binding"] = c.binding;
  d["steps"] = c.steps;
  d["c_op"] = c.c_op;
  d["K"] = c.K;
  d["hypothesis_failures"] = c.hypothesis.failures;
  d["text"] = serialize(c);
  return d;
}

py::array_t<double> matrices(const std::vector<Matrix3>& ms, int n) {
  py::array_t<double> out({static_cast<py::ssize_t>(ms.size()), static_cast<py::ssize_t>(n),
                           static_cast<py::ssize_t>(n)});
  auto v = out.mutable_unchecked<3>();
  for (std::size_t c = 0; c < ms.size(); ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(c, i, j) = ms[c][i][j];
  return out;
}

struct Resolved {
  cli::RunConfig config;
  cli::Problem problem;
};

Resolved resolve_text(const std::string& text, const std::vector<std::string>& overrides) {
  Resolved r{cli::parse_config(text), {}};
  for (const auto& o : overrides) cli::apply_override(r.config, o);
  r.problem = cli::resolve(r.config);
  return r;
}

py::dict certify_config(const std::string& text, const std::vector<std::string>& overrides) {
  const Resolved r = resolve_text(text, overrides);
  ContractionCertificate cert;
  {
    py::gil_scoped_release release;
    cert = search_admissible(r.problem.preset.spec, r.problem.preset.mode, r.problem.certify);
  }
  return certificate_dict(cert);
}

py::dict solve_config(const std::string& text, const std::vector<std::string>& overrides, bool force) {
  const Resolved r = resolve_text(text, overrides);
  SolveReport rep;
  {
    py::gil_scoped_release release;
    const auto cert = search_admissible(r.problem.preset.spec, r.problem.preset.mode, r.problem.certify);
    SolveOptions so;
    so.resolution = r.config.integer("m", 32);
    so.tol = r.config.number("tol", 0.0);
    so.max_iter = r.config.integer("max_iter", so.max_iter);
    so.min_iter = r.config.integer("min_iter", so.min_iter);
    so.alpha = r.problem.certify.alpha;
    so.force = force;
    const HarmonicSeed seed = cli::build_seed(r.config, r.problem, cert.box.gamma);
    rep = solve(r.problem.preset.spec, r.problem.preset.mode, seed, cert, so);
  }
  const int n = r.problem.dim;
  const GridField& u = *rep.solution;
  const auto nodes = static_cast<py::ssize_t>(u.size());
  py::array_t<double> x({nodes, static_cast<py::ssize_t>(n)});
  py::array_t<double> vals({nodes, static_cast<py::ssize_t>(u.components())});
  auto xv = x.mutable_unchecked<2>();
  auto uv = vals.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < nodes; ++i) {
    const Point& p = u.grid().nodes()[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k) xv(i, k) = p[k];
    for (int c = 0; c < u.components(); ++c) uv(i, c) = u.at(static_cast<std::size_t>(i), c);
  }
  py::dict d;
  d["certificate"] = certificate_dict(rep.certificate);
  d["converged"] = rep.converged;
  d["iterations"] = rep.iterations;
  d["history"] = rep.history;
  d["rho_hat"] = rep.rho_hat;
  d["residual"] = rep.final_residual;
  d["stencil_tol"] = rep.stencil_tol;
  d["radiality"] = to_string(rep.radiality.verdict);
  d["hessian_at_origin"] = matrices(rep.hessian_at_origin, n);
  d["gradient_at_origin"] = rep.gradient_at_origin;
  d["nodes"] = x;
  d["values"] = vals;
  return d;
}

py::tuple run_verb(const std::string& verb, const std::string& text, const std::vector<std::string>& overrides) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(verb, text, overrides, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_nlpoisson, m) {
  m.doc() = "Local solver for Delta u = a(x, u, grad u, Hess u) on a ball";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<RefusedError>(m, "RefusedError", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  m.def("preset_names", &preset_names);
  m.def("certify", &certify_config, py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
        "Certificate for a config, as a dict.");
  m.def("solve", &solve_config, py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
        py::arg("force") = false,
        "Certify and iterate. Raises RefusedError when the certificate is not admissible.");
  m.def("run", &run_verb, py::arg("verb"), py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
        "Same as the command-line tool; returns (exit_code, stdout, stderr).");
}
