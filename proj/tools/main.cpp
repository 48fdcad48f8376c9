#include <omp.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlpoisson/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Local solutions of Delta u = a(x, u, grad u, Hess u) on a ball"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 0;
  int presets_n = 2;

  for (const char* verb : {"certify", "solve", "sweep"}) {
    auto* sub = app.add_subcommand(verb);
    sub->add_option("config", config_path, "problem config file ('-' for stdin)");
    sub->add_option("--set", overrides, "key=value override, repeatable")->allow_extra_args(false);
    sub->add_option("--threads", threads, "cap on worker threads")->check(CLI::NonNegativeNumber);
  }
  app.get_subcommand("certify")->description("certify a contraction; exit 0 admissible, 2 not admissible");
  app.get_subcommand("solve")->description("certify, then iterate; exit 0 converged, 2 refused, 3 diverged");
  app.get_subcommand("sweep")->description("tabulate delta and eta over the search lattice into sweep.csv");
  auto* presets = app.add_subcommand("presets", "list the built-in problems");
  presets->add_option("-n", presets_n, "space dimension")->check(CLI::IsMember({2, 3}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : nlpoisson::cli::Usage;
  }
  if (threads > 0) omp_set_num_threads(threads);

  if (presets->parsed()) return nlpoisson::cli::run_presets(presets_n, std::cout);

  std::string text;
  if (config_path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    text = s.str();
  } else if (!config_path.empty()) {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot read " << config_path << '\n';
      return nlpoisson::cli::Usage;
    }
    std::ostringstream s;
    s << f.rdbuf();
    text = s.str();
  }
  const std::string verb = app.get_subcommands().front()->get_name();
  return nlpoisson::cli::run(verb, text, overrides, std::cout, std::cerr);
}
