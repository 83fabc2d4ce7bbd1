// iflearn: simulation experiments, IF-learner fits and group reports.
//
// Exit codes: 0 success, 1 estimation failure, 2 invalid input or config.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iflearn/iflearn.hpp"

namespace fs = std::filesystem;
using namespace iflearn;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string out;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, "config '" + path + "': " + e.what());
  }
}

/// Paths inside a config are relative to the config file.
std::string resolve(const std::string& config_path, const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(config_path).parent_path() / p).lexically_normal().string();
}

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config::hash_json(json(ss.str()));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::io, "failed writing '" + path + "'");
}

/// Writes `<out>.manifest.json` describing how `outputs` were produced.
void write_manifest(const std::string& out, const std::string& command, const json& resolved, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  json files = json::array();
  for (const auto& f : outputs) files.push_back({{"path", fs::path(f).filename().string()}, {"hash", hash_file(f)}});
  const json manifest{{"command", command},
                      {"config", resolved},
                      {"config_hash", config::hash_json(resolved)},
                      {"seed", seed},
                      {"versions", {{"iflearn", kVersion}, {"rng", kRngName}, {"rng_version", kRngVersion}}},
                      {"outputs", files}};
  write_text(out + ".manifest.json", manifest.dump(2) + "\n");
}

json with_seed(json j, const CommonOptions& opt) {
  if (opt.seed) j["seed"] = *opt.seed;
  return j;
}

ColumnMap read_columns(const json& j) {
  config::check_keys(j, {"covariates", "outcome", "treatment"}, "columns");
  ColumnMap c;
  c.covariates = config::require<std::vector<std::string>>(j, "covariates", "columns");
  c.outcome = config::require<std::string>(j, "outcome", "columns");
  if (j.contains("treatment")) c.treatment = config::get<std::string>(j, "treatment", "");
  return c;
}

/// Per-row known propensities from {"constant": c} or {"column": name}.
std::optional<std::vector<double>> read_known_propensity(const json& j, const csv::Table& table) {
  if (!j.contains("known_propensity")) return std::nullopt;
  const auto& k = j["known_propensity"];
  config::check_keys(k, {"constant", "column"}, "known_propensity");
  if (k.contains("constant") == k.contains("column")) {
    fail(ErrorKind::config, "known_propensity needs exactly one of 'constant' or 'column'");
  }
  std::vector<double> pi(table.rows.size());
  if (k.contains("constant")) {
    const double c = config::get(k, "constant", 0.5);
    std::fill(pi.begin(), pi.end(), c);
  } else {
    const auto col = table.require_column(config::get<std::string>(k, "column", ""), "propensity");
    for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = table.rows[i][col];
  }
  return pi;
}

int cmd_simulate(const CommonOptions& opt) {
  const json raw = with_seed(load_json(opt.config), opt);
  const auto cfg = read_experiment_config(raw);
  std::string out = opt.out;
  if (out.empty() && cfg.output) out = resolve(opt.config, *cfg.output);
  if (out.empty()) fail(ErrorKind::config, "no output path: pass --out or set 'output' in the config");

  const auto table = run_replications(cfg, opt.jobs);
  const auto rows = summarize_replications(table, cfg.experiment_id, cfg.discard_threshold);
  std::ostringstream csv_text;
  write_summary_csv(csv_text, rows);
  write_text(out, csv_text.str());
  write_manifest(out, "simulate", json(cfg), cfg.seed, {out});
  return 0;
}

int cmd_fit(const CommonOptions& opt, const std::string& data_flag, const std::string& query_flag) {
  const json raw = with_seed(load_json(opt.config), opt);
  config::check_keys(raw, config::concat_keys({"data", "columns", "known_propensity", "query", "grid"}, kLearnerConfigKeys),
                     "fit config");
  const auto cfg = read_if_learner_config(raw);
  const auto columns = read_columns(config::require<json>(raw, "columns", "fit config"));
  const std::string data_path = !data_flag.empty() ? data_flag : resolve(opt.config, config::require<std::string>(raw, "data", "fit config"));
  const auto table = csv::read_table_file(data_path);
  const auto data = dataset_from_table(table, columns);
  const auto known = read_known_propensity(raw, table);

  Matrix query;
  if (!query_flag.empty() || raw.contains("query")) {
    const std::string qpath = !query_flag.empty() ? query_flag : resolve(opt.config, config::get<std::string>(raw, "query", ""));
    query = csv::covariate_matrix(csv::read_table_file(qpath), columns.covariates);
  } else if (raw.contains("grid")) {
    const auto& g = raw["grid"];
    config::check_keys(g, {"from", "to", "points"}, "grid");
    if (data.dim() != 1) fail(ErrorKind::config, "grid queries need exactly one covariate; use a query CSV");
    const double lo = config::require<double>(g, "from", "grid");
    const double hi = config::require<double>(g, "to", "grid");
    const auto m = config::require<std::size_t>(g, "points", "grid");
    if (m < 2 || !(hi > lo)) fail(ErrorKind::config, "grid needs points >= 2 and to > from");
    query = Matrix(m, 1);
    for (std::size_t i = 0; i < m; ++i) query(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
  } else {
    query = Matrix(std::vector<double>(data.covariates().data().begin(), data.covariates().data().end()), data.size(),
                   data.dim());
  }

  const auto fit = known ? fit_if_learner_detailed(data, cfg, *known) : fit_if_learner_detailed(data, cfg);
  if (opt.out.empty()) fail(ErrorKind::config, "fit needs --out");
  std::ostringstream text;
  for (const auto& name : columns.covariates) text << name << ',';
  text << "psi_hat\n";
  for (std::size_t i = 0; i < query.rows(); ++i) {
    for (const double v : query.row(i)) text << csv::format_double(v) << ',';
    text << csv::format_double(fit.model.predict(query.row(i))) << '\n';
  }
  write_text(opt.out, text.str());
  json resolved = raw;
  resolved["data"] = fs::path(data_path).filename().string();
  resolved["data_hash"] = hash_file(data_path);
  resolved["resolved_learner"] = cfg;
  write_manifest(opt.out, "fit", resolved, cfg.seed, {opt.out});
  return 0;
}

int cmd_group(const CommonOptions& opt, const std::string& data_flag, const std::string& json_out) {
  const json raw = with_seed(load_json(opt.config), opt);
  config::check_keys(
      raw, config::concat_keys(config::concat_keys({"data", "columns", "known_propensity"}, kGroupConfigKeys),
                               kLearnerConfigKeys),
      "group config");
  const auto cfg = read_group_config(raw);
  const auto columns = read_columns(config::require<json>(raw, "columns", "group config"));
  if (!columns.treatment) fail(ErrorKind::config, "group config needs a treatment column");
  const std::string data_path = !data_flag.empty() ? data_flag : resolve(opt.config, config::require<std::string>(raw, "data", "group config"));
  const auto table = csv::read_table_file(data_path);
  const auto data = dataset_from_table(table, columns);
  const auto known = read_known_propensity(raw, table);

  const auto est = known ? fit_group_learner(data, cfg, *known) : fit_group_learner(data, cfg);
  if (opt.out.empty()) fail(ErrorKind::config, "group needs --out");
  std::ostringstream text;
  write_group_csv(text, est);
  write_text(opt.out, text.str());
  std::vector<std::string> outputs{opt.out};
  if (!json_out.empty()) {
    write_text(json_out, json(est).dump(2) + "\n");
    outputs.push_back(json_out);
  }
  json resolved = raw;
  resolved["data"] = fs::path(data_path).filename().string();
  resolved["data_hash"] = hash_file(data_path);
  resolved["resolved_group"] = cfg;
  write_manifest(opt.out, "group", resolved, cfg.seed, outputs);
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool jobs) {
  cmd->add_option("--config", opt.config, "JSON config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "Override the config's master seed");
  if (jobs) cmd->add_option("--jobs", opt.jobs, "Worker threads for replications")->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out, "Output CSV path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IF-learner toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "Run a simulation experiment");
  add_common(sim, sim_opt, true);

  CommonOptions fit_opt;
  std::string fit_data;
  std::string fit_query;
  auto* fitc = app.add_subcommand("fit", "Fit the IF-learner on a CSV and predict");
  add_common(fitc, fit_opt, false);
  fitc->add_option("--data", fit_data, "Training CSV (overrides config 'data')");
  fitc->add_option("--query", fit_query, "Query CSV with the covariate columns (overrides config 'query')");

  CommonOptions group_opt;
  std::string group_data;
  std::string group_json;
  auto* grp = app.add_subcommand("group", "Fit the group learner and report per-group estimates");
  add_common(grp, group_opt, false);
  grp->add_option("--data", group_data, "Training CSV (overrides config 'data')");
  grp->add_option("--json", group_json, "Also write the estimates as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(sim_opt);
    if (*fitc) return cmd_fit(fit_opt, fit_data, fit_query);
    if (*grp) return cmd_group(group_opt, group_data, group_json);
  } catch (const Error& e) {
    std::cerr << "iflearn: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? 2 : 1;
  } catch (const json::exception& e) {
    std::cerr << "iflearn: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "iflearn: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
