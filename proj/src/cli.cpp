#include "cfp/cli.hpp"

#include "cfp/asympt.hpp"
#include "cfp/cfp_sim.hpp"
#include "cfp/exact_seq.hpp"
#include "cfp/llt.hpp"
#include "cfp/partitions.hpp"
#include "cfp/saddle.hpp"
#include "cfp/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cfp {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"exact", "saddle", "llt", "compare", "mu", "stats", "simulate", "report"};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

json cell_to_json(const std::string& s) {
  if (s.empty()) return nullptr;
  long long i = 0;
  auto [iptr, iec] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (iec == std::errc() && iptr == s.data() + s.size()) return i;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v)) return v;
  return s;
}

void write_table(const RunConfig& config, const Table& table, std::ostream& out) {
  if (config.format == "json") {
    json doc;
    doc["config"] = json::parse(config.to_json());
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < table.columns.size(); ++c) obj[table.columns[c]] = cell_to_json(row[c]);
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# " << config.to_json() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const bool quote = row[c].find_first_of(",\" ") != std::string::npos;
      out << (c ? "," : "") << (quote ? "\"" + row[c] + "\"" : row[c]);
    }
    out << '\n';
  }
}

std::string num(double x) { return format_real(x); }
std::string num(const Float& x) { return format_real(x, 20); }

void require_grid(const RunConfig& c) {
  if (c.n_grid.empty()) throw Error(ErrorCode::invalid_argument, "command '" + c.command + "' needs a nonempty --n-grid");
  for (int n : c.n_grid) {
    if (n < 1) throw Error(ErrorCode::invalid_argument, "n-grid entries must be >= 1");
  }
}

void require_N(const RunConfig& c) {
  if (c.N < 1) throw Error(ErrorCode::invalid_argument, "command '" + c.command + "' needs --N >= 1");
}

SeqMode seq_mode(const RunConfig& c) {
  if (c.mode == "rational") return SeqMode::rational(c.precision_bits);
  if (c.mode == "float") return SeqMode::floating(c.precision_bits);
  throw Error(ErrorCode::invalid_argument, "mode must be 'rational' or 'float'");
}

Table run_exact(const RunConfig& c, const ParameterFunction& f) {
  if (c.n_max < 0) throw Error(ErrorCode::invalid_argument, "exact needs --n-max >= 0");
  const CnSequence seq = compute_cn(f, c.n_max, seq_mode(c));
  Table t{{"n", "log_cn", "cn_rational", "ratio_to_next"}, {}};
  std::vector<RatioRow> ratios;
  if (seq.N() >= 1) ratios = ratio_table(seq);
  for (int n = 0; n <= seq.N(); ++n) {
    t.rows.push_back({std::to_string(n), num(seq.log_c(n)),
                      seq.rational_values() ? format_rational(seq.c_exact(n)) : std::string(),
                      n < seq.N() ? num(ratios[static_cast<std::size_t>(n)].ratio) : std::string()});
  }
  return t;
}

Table run_saddle(const RunConfig& c, const ParameterFunction& f) {
  require_grid(c);
  Table t{{"n", "sigma_n", "residual", "B_n2", "rho_3", "S_n_at_tilt"}, {}};
  for (int n : c.n_grid) {
    const SaddlePoint sp = solve_sigma(f, n);
    t.rows.push_back({std::to_string(n), num(sp.sigma_n), num(sp.residual), num(sp.B_n2), num(sp.rho_3),
                      num(sp.S_n_at_tilt)});
  }
  return t;
}

struct LltCells {
  std::vector<std::string> cells;  // sigma_n .. deficit
};

std::vector<std::string> llt_cells(const ParameterFunction& f, int n) {
  const TiltedModel m = TiltedModel::at_saddle(f, n);
  const auto dist = y_distribution<double>(m, n);
  const double pr = dist.pmf[static_cast<std::size_t>(n)];
  std::string alpha0, T1, T2;
  if (n >= 3) {
    const SplitT split = split_T(m, f.power_law_exponent().value_or(1.0));
    alpha0 = num(split.alpha0);
    T1 = num(split.T1);
    T2 = num(split.T2_grid_max);
  }
  return {num(m.saddle->sigma_n), num(m.saddle->B_n2), num(pr), num(llt_ratio(m)), num(lyapunov_ratio(m)),
          alpha0, T1, T2, num(dist.deficit)};
}

Table run_llt(const RunConfig& c, const ParameterFunction& f) {
  require_grid(c);
  Table t{{"n", "sigma_n", "B_n2", "pr_y_n", "llt_ratio", "lyapunov_ratio", "alpha0", "T1", "T2_grid_max", "deficit"},
          {}};
  for (int n : c.n_grid) {
    std::vector<std::string> row{std::to_string(n)};
    for (auto& cell : llt_cells(f, n)) row.push_back(std::move(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct CompareCells {
  double log_exact, log_est, rel_gap;
  ConjectureRow ratio;
};

std::vector<CompareCells> compare_rows(const RunConfig& c, const ParameterFunction& f) {
  require_grid(c);
  for (int n : c.n_grid) {
    if (n < 2) throw Error(ErrorCode::invalid_argument, "compare needs n >= 2");
  }
  const int top = *std::max_element(c.n_grid.begin(), c.n_grid.end()) + 1;
  const CnSequence seq = compute_cn(f, top, SeqMode::floating(c.precision_bits));
  const auto ratios = conjecture_check(seq, c.n_grid);
  std::vector<CompareCells> out;
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    const int n = c.n_grid[i];
    const AsymptoticEstimate est = cn_asymptotic(f, n);
    const double exact = seq.log_c_double(n);
    out.push_back({exact, est.log_cn_est, std::abs(est.log_cn_est - exact) / std::abs(exact), ratios[i]});
  }
  return out;
}

// log c_n = 0 leaves the relative gap undefined
std::string gap_cell(double g) { return std::isfinite(g) ? num(g) : std::string(); }

Table run_compare(const RunConfig& c, const ParameterFunction& f) {
  Table t{{"n", "log_cn_exact", "log_cn_est", "rel_gap", "ratio_lhs", "ratio_rhs", "a_over_c"}, {}};
  const auto rows = compare_rows(c, f);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.rows.push_back({std::to_string(c.n_grid[i]), num(r.log_exact), num(r.log_est), gap_cell(r.rel_gap),
                      num(r.ratio.lhs), num(r.ratio.rhs), num(r.ratio.a_over_c)});
  }
  return t;
}

Table run_report(const RunConfig& c, const ParameterFunction& f) {
  Table t{{"n", "log_cn_exact", "sigma_n", "B_n2", "pr_y_n", "llt_ratio", "lyapunov_ratio", "log_cn_est", "rel_gap",
           "ratio_lhs", "ratio_rhs", "a_over_c"},
          {}};
  const auto rows = compare_rows(c, f);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int n = c.n_grid[i];
    const auto llt = llt_cells(f, n);
    const auto& r = rows[i];
    t.rows.push_back({std::to_string(n), num(r.log_exact), llt[0], llt[1], llt[2], llt[3], llt[4], num(r.log_est),
                      gap_cell(r.rel_gap), num(r.ratio.lhs), num(r.ratio.rhs), num(r.ratio.a_over_c)});
  }
  return t;
}

std::string exact_or_float(const ExactOrFloat& v) {
  return v.exact ? format_rational(*v.exact) : num(v.value);
}

Table run_mu(const RunConfig& c, const ParameterFunction& f) {
  require_N(c);
  Table t{{"partition", "weight", "prob"}, {}};
  for (const auto& e : mu_exact(c.N, f)) {
    t.rows.push_back({e.state.to_string(), exact_or_float(e.weight), exact_or_float(e.prob)});
  }
  return t;
}

Table run_stats(const RunConfig& c, const ParameterFunction& f) {
  require_N(c);
  const bool rational = c.mode == "rational";
  const CnSequence seq = compute_cn(f, c.N, seq_mode(c));
  Table t{{"quantity", "k", "l", "value"}, {}};
  const EquilibriumReport report = equilibrium_report(f, c.N, seq, c.pairs);
  for (int k = 1; k <= c.N; ++k) {
    t.rows.push_back({"expected_count", std::to_string(k), "", num(report.expected_counts[static_cast<std::size_t>(k - 1)])});
  }
  t.rows.push_back({"v_N", "", "", num(report.v_N)});
  for (const auto& e : report.cov_entries) {
    std::string value = rational ? format_rational(covariance_exact(f, c.N, e.k, e.l, seq)) : num(e.value);
    t.rows.push_back({"covariance", std::to_string(e.k), std::to_string(e.l), value});
  }
  if (c.alpha) t.rows.push_back({"gelation_gap", "", "", num(gelation_diagnostic(f, c.N, *c.alpha, seq))});
  if (c.samples > 0) {
    const SamplerRun run = sample_mu_many(f, c.N, c.samples, c.tilt, c.seed, c.threads);
    t.rows.push_back({"sampler_tilt", "", "", num(run.tilt)});
    t.rows.push_back({"sampler_acceptance_rate", "", "", num(run.acceptance_rate)});
    std::vector<double> mean(static_cast<std::size_t>(c.N), 0.0);
    for (const auto& s : run.samples) {
      for (auto [k, m] : s.parts()) mean[static_cast<std::size_t>(k - 1)] += m;
    }
    for (int k = 1; k <= c.N; ++k) {
      t.rows.push_back({"sampled_mean_count", std::to_string(k), "",
                        num(mean[static_cast<std::size_t>(k - 1)] / static_cast<double>(run.samples.size()))});
    }
  }
  return t;
}

Table run_simulate(const RunConfig& c, const ParameterFunction& f) {
  require_N(c);
  if (c.events == 0 && !(c.t_max > 0.0)) throw Error(ErrorCode::invalid_argument, "simulate needs --events or --t-max");
  SimulationOptions opt;
  opt.event_cap = c.events;
  if (c.t_max > 0.0) opt.t_max = c.t_max;
  opt.seed = c.seed;
  opt.record_events = true;
  const RateKernel kernel = canonical_kernel(f, c.N);
  const Trajectory traj = simulate(f, c.N, kernel, opt);
  if (!c.event_log.empty()) {
    std::ofstream log(c.event_log);
    if (!log) throw Error(ErrorCode::io_error, "cannot write event log '" + c.event_log + "'");
    log << "time,move_type,i,j\n";
    for (const auto& ev : traj.events) {
      log << num(ev.time) << ',' << (ev.move.type == Move::Type::coagulation ? "coag" : "frag") << ','
          << ev.move.i << ',' << ev.move.j << '\n';
    }
  }
  Table t{{"partition", "occupation_time", "mu_exact", "z_score"}, {}};
  for (const auto& row : occupation_summary(traj, f, c.N)) {
    t.rows.push_back({row.state.to_string(), num(row.occupation_time), num(row.mu), num(row.z_score)});
  }
  return t;
}

std::vector<std::pair<int, int>> parse_pairs(const std::vector<std::string>& items) {
  std::vector<std::pair<int, int>> out;
  for (const auto& item : items) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::invalid_argument, "pair '" + item + "' must look like k:l");
    try {
      out.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "pair '" + item + "' must look like k:l");
    }
  }
  return out;
}

void write_error(std::ostream& err, std::string_view code, const std::string& message) {
  json record;
  record["error"] = code;
  record["message"] = message;
  err << record.dump() << '\n';
}

}  // namespace

std::string RunConfig::to_json() const {
  json j;
  j["command"] = command;
  json fam = json::object();
  for (const auto& [k, v] : family) fam[k] = v;
  j["family"] = fam;
  if (n_max >= 0) j["n_max"] = n_max;
  if (!n_grid.empty()) j["n_grid"] = n_grid;
  if (N > 0) j["N"] = N;
  j["mode"] = mode;
  j["precision_bits"] = precision_bits;
  j["seed"] = seed;
  j["format"] = format;
  if (!pairs.empty()) {
    json p = json::array();
    for (auto [k, l] : pairs) p.push_back({k, l});
    j["pairs"] = p;
  }
  if (samples) j["samples"] = samples;
  if (events) j["events"] = events;
  if (t_max > 0.0) j["t_max"] = t_max;
  if (tilt) j["tilt"] = *tilt;
  if (alpha) j["alpha"] = *alpha;
  return j.dump();
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Partition-function numerics for reversible coagulation-fragmentation equilibria", "cfp"};
  app.set_config("--config", "", "Key-value file overriding defaults");
  app.require_subcommand(1, 1);

  RunConfig c;
  std::string family, p, beta, R, base, p1, p2;
  std::vector<std::string> table, pairs;
  double tilt = std::nan(""), alpha = std::nan("");

  app.add_option("--family", family, "powerlaw | ewens | table | rescaled");
  app.add_option("--p", p, "Power-law exponent (a_j = j^{p-1})");
  app.add_option("--beta", beta, "Ewens parameter (a_j = beta/j)");
  app.add_option("--R", R, "Rescaling factor for family = rescaled");
  app.add_option("--base", base, "Base family for family = rescaled");
  app.add_option("--table", table, "Table entries a_1, a_2, ...")->delimiter(',');
  app.add_option("--p1", p1, "Declared lower exponent of F(p1, p2)");
  app.add_option("--p2", p2, "Declared upper exponent of F(p1, p2)");
  app.add_option("--n-max", c.n_max, "Largest n for 'exact'");
  app.add_option("--n-grid", c.n_grid, "Comma-separated n values")->delimiter(',');
  app.add_option("--N", c.N, "System size N");
  app.add_option("--mode", c.mode, "rational | float")->check(CLI::IsMember({"rational", "float"}));
  app.add_option("--precision", c.precision_bits, "Extended precision in bits")
      ->envname("CFP_PRECISION_BITS")
      ->check(CLI::Range(53u, 1u << 20));
  app.add_option("--seed", c.seed, "Master random seed");
  app.add_option("--out", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output,-o", c.output, "Output file (default: standard output)");
  app.add_option("--pairs", pairs, "Covariance pairs k:l, comma-separated")->delimiter(',');
  app.add_option("--samples", c.samples, "Number of exact samples of mu_N");
  app.add_option("--events", c.events, "Event cap for 'simulate'");
  app.add_option("--t-max", c.t_max, "Time horizon for 'simulate'");
  app.add_option("--tilt", tilt, "Sampler tilt (default sigma_N)");
  app.add_option("--alpha", alpha, "Gelation diagnostic fraction in (0, 1]");
  app.add_option("--threads", c.threads, "Worker threads for sampling");
  app.add_option("--event-log", c.event_log, "Write the simulated event stream as CSV");

  for (const auto& name : kCommands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::invalid_argument, e.what());
  }

  c.command = app.get_subcommands().front()->get_name();
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) c.family[key] = v;
  };
  put("family", family);
  put("p", p);
  put("beta", beta);
  put("R", R);
  put("base", base);
  put("p1", p1);
  put("p2", p2);
  if (!table.empty()) {
    std::string list = "[";
    for (std::size_t i = 0; i < table.size(); ++i) list += (i ? ", " : "") + table[i];
    c.family["table"] = list + "]";
  }
  c.pairs = parse_pairs(pairs);
  if (!std::isnan(tilt)) c.tilt = tilt;
  if (!std::isnan(alpha)) c.alpha = alpha;
  if (app.get_subcommands().front()->get_name() != c.command) throw Error(ErrorCode::invalid_argument, "bad command");
  return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (std::find(kCommands.begin(), kCommands.end(), config.command) == kCommands.end()) {
      throw Error(ErrorCode::invalid_argument, "unknown command '" + config.command + "'");
    }
    if (config.format != "csv" && config.format != "json") {
      throw Error(ErrorCode::invalid_argument, "output format must be csv or json");
    }
    WorkingPrecision precision(config.precision_bits);
    const ParameterFunction f = ParameterFunction::from_key_values(config.family);

    Table table;
    if (config.command == "exact") table = run_exact(config, f);
    else if (config.command == "saddle") table = run_saddle(config, f);
    else if (config.command == "llt") table = run_llt(config, f);
    else if (config.command == "compare") table = run_compare(config, f);
    else if (config.command == "mu") table = run_mu(config, f);
    else if (config.command == "stats") table = run_stats(config, f);
    else if (config.command == "simulate") table = run_simulate(config, f);
    else table = run_report(config, f);

    if (config.output.empty()) {
      write_table(config, table, out);
    } else {
      std::ofstream file(config.output);
      if (!file) throw Error(ErrorCode::io_error, "cannot write '" + config.output + "'");
      write_table(config, table, file);
    }
    return 0;
  } catch (const Error& e) {
    write_error(err, to_string(e.code()), e.what());
    return e.code() == ErrorCode::invalid_argument ? 2 : 1;
  } catch (const std::exception& e) {
    write_error(err, "internal", e.what());
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_command_line(argc, argv, out);
  } catch (const Error& e) {
    write_error(err, to_string(e.code()), e.what());
    return 2;
  }
  if (!config) return 0;
  return run(*config, out, err);
}

}  // namespace cfp
