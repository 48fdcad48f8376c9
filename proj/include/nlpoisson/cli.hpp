#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nlpoisson/applications.hpp"
#include "nlpoisson/certificate.hpp"
#include "nlpoisson/solver.hpp"

namespace nlpoisson::cli {

/// Exit codes shared by every verb.
enum Exit : int { Ok = 0, Usage = 1, NotAdmissible = 2, Refused = 2, Diverged = 3 };

/// A run configuration as read from a file plus `--set` overrides.
///
/// Grammar, one item per line, `#` starts a comment:
///   key = value        plain setting (see known_keys())
///   aI = expression    inline system component I
///   gij = expression   metric entry for the geometric presets
///   hJ_KL = number     explicit seed coefficient a_KL of component J
struct RunConfig {
  std::map<std::string, std::string> values;
  std::map<std::string, int> value_lines;
  /// Expression lines with their original line numbers preserved, so that
  /// parse errors point into the config file.
  std::string system_source;
  std::string metric_source;
  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::vector<double> list(const std::string& key) const;
};

const std::vector<std::string>& known_keys();

/// Throws ParseError with line and column.
RunConfig parse_config(std::string_view text);
/// `key=value` from the command line; replaces any file value.
void apply_override(RunConfig& config, std::string_view assignment);

/// The problem a config describes, with every default filled in.
struct Problem {
  ProblemPreset preset;
  CertifyOptions certify;
  int dim = 2;
};
Problem resolve(const RunConfig& config);

/// Seed coefficients for a certified gamma0, per the `seed` key.
HarmonicSeed build_seed(const RunConfig& config, const Problem& problem, double gamma0);

int run_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_presets(int n, std::ostream& out);

/// Parses the config text, applies overrides and runs the verb. Every
/// failure is mapped to an exit code; nothing escapes.
int run(const std::string& verb, std::string_view config_text, const std::vector<std::string>& overrides,
        std::ostream& out, std::ostream& err);

void write_history_csv(std::ostream& out, const std::vector<double>& history);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string render_report(const RunConfig& config, const Problem& problem, const ContractionCertificate& cert,
                          const SolveReport* report, const std::string& status);

}  // namespace nlpoisson::cli
