// Command-line front end: a serializable run description and its executor.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cfp {

struct RunConfig {
  std::string command;  // exact, saddle, llt, compare, mu, stats, simulate, report
  /// Parameter-function keys: family, p, beta, R, base, table, p1, p2.
  std::map<std::string, std::string> family;
  int n_max = -1;
  std::vector<int> n_grid;
  int N = 0;
  std::string mode = "float";  // rational | float
  unsigned precision_bits = 128;
  std::uint64_t seed = 1;
  std::string format = "csv";  // csv | json
  std::string output;          // empty: standard output
  std::vector<std::pair<int, int>> pairs;
  std::size_t samples = 0;
  std::uint64_t events = 0;
  double t_max = 0.0;  // 0: unlimited, bounded by events
  std::optional<double> tilt;
  std::optional<double> alpha;
  unsigned threads = 1;
  std::string event_log;

  std::string to_json() const;
};

/// Parses argv into a RunConfig. Throws cfp::Error on usage errors; returns
/// std::nullopt when help was printed.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out);

/// Executes a run; writes the artifact to config.output (or `out`) and a
/// structured JSON error record to `err` on failure. Returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_command_line + run, with usage errors reported like run errors.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cfp
