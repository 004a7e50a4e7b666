#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "jascl/bench/io.hpp"
#include "jascl/bench/runner.hpp"
#include "jascl/dynamics.hpp"
#include "jascl/gas.hpp"
#include "jascl/json_io.hpp"
#include "jascl/numerics.hpp"
#include "jascl/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

namespace jascl::cli {

/// Schema violation in the run configuration; rendered as exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Best-effort line anchor: first line of the raw config containing "key".
inline std::size_t key_line(const std::string& raw, const std::string& key) {
  std::string needle = "\"" + key + "\"";
  std::istringstream in(raw);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find(needle) != std::string::npos) return number;
  }
  return 0;
}

inline void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                       const std::string& section, const std::string& raw,
                       const std::string& path) {
  if (!obj.is_object()) {
    throw ConfigError(path + ": section \"" + section + "\" must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      std::size_t line = key_line(raw, key);
      throw ConfigError(path + ":" + std::to_string(line) + ": unknown key \"" + key +
                        "\" in " + section);
    }
  }
}

inline std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StateError("cannot open output file " + path.string());
  out << text;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

struct RunConfig {
  std::uint64_t seed = 42;
  std::filesystem::path out = "out";
  std::size_t jobs = 1;
  nlohmann::json file;     // parsed config file ({} when absent)
  std::string file_raw;    // original text, for line anchoring
  std::string file_path = "<defaults>";

  std::optional<std::vector<double>> epsilon_sweep_flag;
  std::optional<std::vector<double>> rho_sweep_flag;

  nlohmann::json section(const std::string& name) const {
    if (file.contains(name)) return file.at(name);
    return nlohmann::json::object();
  }

  template <typename T>
  T get(const nlohmann::json& sec, const std::string& key, T fallback) const {
    if (sec.contains(key)) return sec.at(key).get<T>();
    return fallback;
  }
};

namespace detail {

inline void validate_schema(const RunConfig& cfg) {
  const auto& j = cfg.file;
  const std::string& raw = cfg.file_raw;
  const std::string& path = cfg.file_path;
  check_keys(j,
             {"seed", "out", "jobs", "dynamics", "gas_landscape", "bench", "validate_theory",
              "report"},
             "the top level", raw, path);
  if (j.contains("dynamics")) {
    check_keys(j.at("dynamics"),
               {"epsilon0", "gamma", "alpha", "f", "rho", "steps", "population", "replicates",
                "rho_sweep", "mode"},
               "dynamics", raw, path);
  }
  if (j.contains("gas_landscape")) {
    check_keys(j.at("gas_landscape"),
               {"dimension", "scenarios", "rho_radius", "epsilon_sweep", "approx_error"},
               "gas_landscape", raw, path);
  }
  if (j.contains("bench")) {
    check_keys(j.at("bench"),
               {"height", "width", "shots", "unlabeled", "seeds", "configs", "base_epochs",
                "incremental_epochs", "lr", "batch_size", "lambda_cons", "lambda_proto",
                "ema_alpha", "tau_conf", "tau_sim", "student_input_noise", "test_count",
                "write_datasets"},
               "bench", raw, path);
  }
  if (j.contains("validate_theory")) {
    check_keys(j.at("validate_theory"), {"seed"}, "validate_theory", raw, path);
  }
  if (j.contains("report")) {
    check_keys(j.at("report"), {}, "report", raw, path);
  }
}

inline nlohmann::json resolved_config(const RunConfig& cfg, const std::string& command) {
  nlohmann::json snapshot = cfg.file;
  snapshot["seed"] = cfg.seed;
  snapshot["out"] = cfg.out.generic_string();
  snapshot["jobs"] = cfg.jobs;
  snapshot["command"] = command;
  if (cfg.epsilon_sweep_flag) snapshot["gas_landscape"]["epsilon_sweep"] = *cfg.epsilon_sweep_flag;
  if (cfg.rho_sweep_flag) snapshot["dynamics"]["rho_sweep"] = *cfg.rho_sweep_flag;
  return snapshot;
}

}  // namespace detail

inline int cmd_validate_theory(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto sec = cfg.section("validate_theory");
  std::uint64_t seed = cfg.get<std::uint64_t>(sec, "seed", cfg.seed);
  auto checks = validate::run_theory_checks(seed);

  nlohmann::json summary;
  summary["seed"] = seed;
  nlohmann::json list = nlohmann::json::array();
  std::string first_failure;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"status", c.pass ? "pass" : "fail"},
                    {"detail", c.detail}});
    out << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "\n";
    if (!c.pass && first_failure.empty()) first_failure = c.name;
  }
  summary["checks"] = list;
  summary["all_pass"] = validate::all_pass(checks);
  detail::write_json(cfg.out / "theory_validation.json", summary);

  if (!first_failure.empty()) {
    err << "invariant failed: " << first_failure << "\n";
    return 1;
  }
  return 0;
}

inline int cmd_dynamics(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace jascl::dynamics;
  auto sec = cfg.section("dynamics");
  double epsilon0 = cfg.get(sec, "epsilon0", 0.3);
  double gamma = cfg.get(sec, "gamma", 0.8);
  double alpha = cfg.get(sec, "alpha", 0.9);
  double f = cfg.get(sec, "f", 0.5);
  double rho = cfg.get(sec, "rho", 0.9);
  std::size_t steps = cfg.get<std::size_t>(sec, "steps", 200);
  std::size_t population = cfg.get<std::size_t>(sec, "population", 100000);
  std::size_t replicates = cfg.get<std::size_t>(sec, "replicates", 20);

  DynamicsParams params(epsilon0, gamma, alpha, f, rho);
  auto traj = monte_carlo_oracle(params, population, steps, replicates, cfg.seed);
  std::string csv = "step,analytic,mc_mean,mc_stderr\n";
  for (std::size_t t = 0; t < traj.analytic.size(); ++t) {
    csv += std::to_string(t) + "," + detail::fmt(traj.analytic[t]) + "," +
           detail::fmt(traj.mc_mean[t]) + "," + detail::fmt(traj.mc_stderr[t]) + "\n";
  }
  detail::write_text(cfg.out / "dynamics_trajectory.csv", csv);

  std::vector<double> rhos;
  if (cfg.rho_sweep_flag) {
    rhos = *cfg.rho_sweep_flag;
  } else if (sec.contains("rho_sweep")) {
    rhos = sec.at("rho_sweep").get<std::vector<double>>();
  } else {
    for (int i = 0; i <= 10; ++i) rhos.push_back(0.1 * i);
  }
  std::string sweep_csv = "rho,asymptotic_error\n";
  for (double r : rhos) {
    DynamicsParams p(epsilon0, gamma, alpha, f, std::min(1.0, std::max(0.0, r)));
    sweep_csv += detail::fmt(r) + "," +
                 detail::fmt(asymptotic_error(p, FilterMode::filtered)) + "\n";
  }
  detail::write_text(cfg.out / "dynamics_rho_sweep.csv", sweep_csv);

  // (f, rho) grid for heatmap plotting.
  nlohmann::json grid = nlohmann::json::array();
  for (int fi = 0; fi <= 10; ++fi) {
    for (int ri = 0; ri <= 10; ++ri) {
      double fv = 0.1 * fi;
      double rv = 0.1 * ri;
      DynamicsParams p(epsilon0, gamma, alpha, fv, rv);
      grid.push_back({{"f", fv},
                      {"rho", rv},
                      {"asymptotic_error", asymptotic_error(p, FilterMode::filtered)}});
    }
  }
  nlohmann::json sweep;
  sweep["epsilon0"] = epsilon0;
  sweep["gamma"] = gamma;
  sweep["alpha"] = alpha;
  sweep["grid"] = grid;
  detail::write_json(cfg.out / "dynamics_sweep.json", sweep);

  out << "dynamics: trajectory (" << steps << " steps), rho sweep (" << rhos.size()
      << " points), grid 11x11\n";
  return 0;
}

inline int cmd_gas_landscape(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace jascl::numerics;
  using namespace jascl::gas;
  auto sec = cfg.section("gas_landscape");
  std::size_t dimension = cfg.get<std::size_t>(sec, "dimension", 8);
  std::size_t scenarios = cfg.get<std::size_t>(sec, "scenarios", 500);
  double rho_radius = cfg.get(sec, "rho_radius", 1.0);
  double approx_error = cfg.get(sec, "approx_error", 0.05);

  RngRoot root(cfg.seed);
  RngStream rng = root.stream("gas-landscape");

  std::size_t gas_below_static = 0, gas_below_memory = 0, gas_below_iso = 0;
  std::string kl_csv = "scenario,kind,dimension,fisher_variance,kl_gas,kl_iso,kl_static,kl_memory\n";
  {
    // Hand case: F_t = [1,1] shifted to [2, 0.5], static calibrated at t.
    FisherDiagonal shifted({2.0, 0.5});
    KlComparisonOptions opts;
    opts.static_lambda = 1.0;
    opts.memory_fisher_hist = std::vector<double>{1.0, 1.0};
    auto rep = kl_comparison(shifted, opts);
    kl_csv += "0,hand,2," + detail::fmt(rep.fisher_variance) + "," + detail::fmt(rep.kl_gas) +
              "," + detail::fmt(rep.kl_iso) + "," + detail::fmt(*rep.kl_static) + "," +
              detail::fmt(*rep.kl_memory) + "\n";
  }
  for (std::size_t s = 1; s <= scenarios; ++s) {
    std::vector<double> prev(dimension), cur(dimension), est(dimension);
    for (std::size_t i = 0; i < dimension; ++i) {
      prev[i] = rng.uniform(0.5, 4.0);
      double factor = rng.uniform(1.5, 3.0);
      cur[i] = rng.bernoulli(0.5) ? prev[i] * factor : prev[i] / factor;
      est[i] = cur[i] * (1.0 + rng.uniform(-approx_error, approx_error));
    }
    FisherDiagonal fisher(cur);
    KlComparisonOptions opts;
    opts.gas_fisher_estimate = est;
    opts.gas_optimal_c = true;
    double prev_mean = 0.0;
    for (double v : prev) prev_mean += v;
    opts.static_lambda = static_cast<double>(dimension) / prev_mean;
    opts.memory_fisher_hist = prev;
    auto rep = kl_comparison(fisher, opts);
    if (rep.kl_gas < *rep.kl_static) ++gas_below_static;
    if (rep.kl_gas < *rep.kl_memory) ++gas_below_memory;
    if (rep.kl_gas < rep.kl_iso) ++gas_below_iso;
    kl_csv += std::to_string(s) + ",shift," + std::to_string(dimension) + "," +
              detail::fmt(rep.fisher_variance) + "," + detail::fmt(rep.kl_gas) + "," +
              detail::fmt(rep.kl_iso) + "," + detail::fmt(*rep.kl_static) + "," +
              detail::fmt(*rep.kl_memory) + "\n";
  }
  detail::write_text(cfg.out / "gas_kl_comparison.csv", kl_csv);

  nlohmann::json gas_summary;
  gas_summary["scenarios"] = scenarios;
  gas_summary["gas_below_static"] = gas_below_static;
  gas_summary["gas_below_memory"] = gas_below_memory;
  gas_summary["gas_below_iso"] = gas_below_iso;
  detail::write_json(cfg.out / "gas_summary.json", gas_summary);

  std::string adv_csv = "scenario,dimension,kappa,delta_adv,delta_gas,ratio\n";
  {
    auto cmp = adversarial_comparison(QuadraticLandscape({3.0, 1.0}), 1.0);
    adv_csv += "0,2,3," + detail::fmt(cmp.delta_adv) + "," + detail::fmt(cmp.delta_gas) + "," +
               detail::fmt(cmp.ratio) + "\n";
  }
  for (std::size_t s = 1; s <= std::min<std::size_t>(scenarios, 100); ++s) {
    std::size_t d = 1 + rng.uniform_index(10);
    std::vector<double> eig(d);
    for (auto& l : eig) l = rng.uniform(0.05, 5.0);
    QuadraticLandscape land(eig);
    auto cmp = adversarial_comparison(land, rho_radius);
    adv_csv += std::to_string(s) + "," + std::to_string(d) + "," +
               detail::fmt(land.condition_number()) + "," + detail::fmt(cmp.delta_adv) + "," +
               detail::fmt(cmp.delta_gas) + "," + detail::fmt(cmp.ratio) + "\n";
  }
  detail::write_text(cfg.out / "gas_adversarial.csv", adv_csv);

  std::vector<double> eps_sweep;
  if (cfg.epsilon_sweep_flag) {
    eps_sweep = *cfg.epsilon_sweep_flag;
  } else if (sec.contains("epsilon_sweep")) {
    eps_sweep = sec.at("epsilon_sweep").get<std::vector<double>>();
  }
  if (!eps_sweep.empty()) {
    // Noise scales of one fixed buffer under each epsilon.
    Matrix grads(4, 4);
    RngStream grng = root.stream("gas-landscape/epsilon-buffer");
    for (auto& v : grads.data) v = grng.uniform(-1.0, 1.0);
    std::string eps_csv = "epsilon,index,scale\n";
    for (double eps : eps_sweep) {
      GradientBuffer buf(4, 4, eps);
      buf.accumulate(grads);
      auto scales = noise_scales(buf);
      for (std::size_t i = 0; i < scales.scales.size(); ++i) {
        eps_csv += detail::fmt(eps) + "," + std::to_string(i) + "," +
                   detail::fmt(scales.scales.data[i]) + "\n";
      }
    }
    detail::write_text(cfg.out / "gas_epsilon_sweep.csv", eps_csv);
  }

  out << "gas-landscape: " << scenarios << " shift scenarios, adversarial table"
      << (eps_sweep.empty() ? "" : ", epsilon sweep") << "\n";
  return 0;
}

inline int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace jascl::bench;
  auto sec = cfg.section("bench");

  std::size_t shots = cfg.get<std::size_t>(sec, "shots", 5);
  std::size_t unlabeled = cfg.get<std::size_t>(sec, "unlabeled", 50);
  ContinualProtocol protocol = default_joint_shift_protocol(shots, unlabeled);

  RunnerOptions opts;
  opts.height = cfg.get<std::size_t>(sec, "height", 32);
  opts.width = cfg.get<std::size_t>(sec, "width", 32);
  opts.base_epochs = cfg.get<std::size_t>(sec, "base_epochs", 30);
  opts.incremental_epochs = cfg.get<std::size_t>(sec, "incremental_epochs", 12);
  opts.jobs = cfg.jobs;

  TrainConfig base;
  base.lr = cfg.get(sec, "lr", 0.5);
  base.batch_size = cfg.get<std::size_t>(sec, "batch_size", std::size_t{8});
  base.lambda_cons = cfg.get(sec, "lambda_cons", 1.0);
  base.lambda_proto = cfg.get(sec, "lambda_proto", 0.1);
  base.ema_alpha = cfg.get(sec, "ema_alpha", 0.95);
  base.student_input_noise = cfg.get(sec, "student_input_noise", 0.05);
  base.filter = pas::FilterConfig(cfg.get(sec, "tau_conf", 0.7), cfg.get(sec, "tau_sim", 0.7));

  std::vector<std::uint64_t> seeds =
      cfg.get<std::vector<std::uint64_t>>(sec, "seeds", {1, 2, 3, 4, 5});
  std::vector<std::string> wanted = cfg.get<std::vector<std::string>>(
      sec, "configs", {"vanilla", "gas-only", "pas-only", "jascl", "jascl-no-unlabeled"});

  std::vector<NamedConfig> all = standard_config_matrix(base);
  {
    TrainConfig no_unl = all.back().train;
    no_unl.use_unlabeled = false;
    all.push_back({"jascl-no-unlabeled", no_unl});
  }
  std::vector<NamedConfig> configs;
  for (const auto& name : wanted) {
    bool found = false;
    for (const auto& c : all) {
      if (c.name == name) {
        configs.push_back(c);
        found = true;
      }
    }
    if (!found) throw ConfigError("bench: unknown config name \"" + name + "\"");
  }

  if (cfg.get(sec, "write_datasets", false)) {
    for (auto seed : seeds) {
      auto data = generate_protocol_data(protocol, opts.height, opts.width, seed);
      write_dataset(cfg.out / ("datasets/seed" + std::to_string(seed)), protocol, data, seed);
    }
  }

  ComparisonReport report = run_protocol(protocol, configs, seeds, opts);
  detail::write_json(cfg.out / "bench_report.json", nlohmann::json(report));
  detail::write_text(cfg.out / "bench_report.csv", comparison_csv(report));

  std::string logs = "config,seed,session,epoch,accepted_pct,measured_f,measured_rho\n";
  for (const auto& cell : report.cells) {
    for (std::size_t t = 0; t < cell.session_logs.size(); ++t) {
      for (const auto& e : cell.session_logs[t].epochs) {
        logs += cell.config + "," + std::to_string(cell.seed) + "," + std::to_string(t) + "," +
                std::to_string(e.epoch) + "," + detail::fmt(e.accepted_pct) + "," +
                detail::fmt(e.measured_f) + "," +
                (e.rho_vacuous ? std::string("") : detail::fmt(e.measured_rho)) + "\n";
      }
    }
  }
  detail::write_text(cfg.out / "bench_training_logs.csv", logs);

  out << "bench: " << configs.size() << " configs x " << seeds.size() << " seeds across "
      << protocol.sessions.size() << " sessions\n";
  return 0;
}

inline int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  namespace fs = std::filesystem;
  nlohmann::json summary = nlohmann::json::object();
  std::string csv = "source,key,value\n";

  auto load = [&](const char* file) -> std::optional<nlohmann::json> {
    fs::path p = cfg.out / file;
    if (!fs::exists(p)) return std::nullopt;
    std::ifstream in(p);
    return nlohmann::json::parse(in);
  };

  if (auto theory = load("theory_validation.json")) {
    summary["theory"] = {{"all_pass", theory->at("all_pass")}};
    std::size_t passed = 0, total = 0;
    for (const auto& c : theory->at("checks")) {
      ++total;
      if (c.at("status") == "pass") ++passed;
    }
    summary["theory"]["passed"] = passed;
    summary["theory"]["total"] = total;
    csv += "theory,passed," + std::to_string(passed) + "\n";
    csv += "theory,total," + std::to_string(total) + "\n";
  }
  if (auto dyn = load("dynamics_sweep.json")) {
    summary["dynamics"] = {{"epsilon0", dyn->at("epsilon0")},
                           {"gamma", dyn->at("gamma")},
                           {"grid_points", dyn->at("grid").size()}};
    csv += "dynamics,grid_points," + std::to_string(dyn->at("grid").size()) + "\n";
  }
  if (auto gas = load("gas_summary.json")) {
    summary["gas_landscape"] = *gas;
    csv += "gas,scenarios," + std::to_string(gas->at("scenarios").get<std::size_t>()) + "\n";
    csv += "gas,gas_below_static," +
           std::to_string(gas->at("gas_below_static").get<std::size_t>()) + "\n";
    csv += "gas,gas_below_memory," +
           std::to_string(gas->at("gas_below_memory").get<std::size_t>()) + "\n";
  }
  if (auto bench = load("bench_report.json")) {
    std::map<std::string, std::pair<double, std::size_t>> mean_drop;
    for (const auto& cell : bench->at("cells")) {
      if (!cell.contains("total_drop_percent")) continue;
      auto& agg = mean_drop[cell.at("config").get<std::string>()];
      agg.first += cell.at("total_drop_percent").get<double>();
      agg.second += 1;
    }
    nlohmann::json per_config = nlohmann::json::object();
    for (const auto& [name, agg] : mean_drop) {
      double mean = agg.first / static_cast<double>(agg.second);
      per_config[name] = {{"mean_total_drop_percent", mean}, {"cells", agg.second}};
      csv += "bench," + name + "_mean_total_drop," + detail::fmt(mean) + "\n";
    }
    summary["bench"] = per_config;
  }

  detail::write_json(cfg.out / "summary.json", summary);
  detail::write_text(cfg.out / "summary.csv", csv);
  out << "report: merged " << summary.size() << " source(s)\n";
  return 0;
}

/// Entry point shared by the binary and the tests; argv excludes the program
/// name. Exit status: 0 success, 1 internal check failure, 2 config/schema.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"continual-learning mechanism laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  std::size_t jobs = 1;
  std::string epsilon_sweep, rho_sweep;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "root random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "parallel sweep cells");

  auto* validate_cmd = app.add_subcommand("validate-theory", "run the invariant suites");
  auto* dynamics_cmd = app.add_subcommand("dynamics", "error-dynamics trajectories and sweeps");
  dynamics_cmd->add_option("--rho-sweep", rho_sweep, "comma-separated precision values");
  auto* gas_cmd = app.add_subcommand("gas-landscape", "KL comparison and adversarial tables");
  gas_cmd->add_option("--epsilon-sweep", epsilon_sweep, "comma-separated epsilon values");
  auto* bench_cmd = app.add_subcommand("bench", "run the continual benchmark matrix");
  auto* report_cmd = app.add_subcommand("report", "merge prior outputs into a summary");

  std::vector<const char*> argv_c;
  argv_c.push_back("jascl");
  for (const auto& a : args) argv_c.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv_c.size()), argv_c.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.out = out_dir;
    cfg.jobs = jobs;
    cfg.file = nlohmann::json::object();
    if (!config_path.empty()) {
      cfg.file_path = config_path;
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg.file_raw = ss.str();
      try {
        cfg.file = nlohmann::json::parse(cfg.file_raw);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
    }
    if (!epsilon_sweep.empty()) {
      cfg.epsilon_sweep_flag = detail::parse_double_list(epsilon_sweep);
    }
    if (!rho_sweep.empty()) cfg.rho_sweep_flag = detail::parse_double_list(rho_sweep);

    detail::validate_schema(cfg);
    // Config file values apply unless the flag was given explicitly.
    if (cfg.file.contains("seed") && app.count("--seed") == 0) {
      cfg.seed = cfg.file.at("seed").get<std::uint64_t>();
    }
    if (cfg.file.contains("out") && app.count("--out") == 0) {
      cfg.out = cfg.file.at("out").get<std::string>();
    }
    if (cfg.file.contains("jobs") && app.count("--jobs") == 0) {
      cfg.jobs = cfg.file.at("jobs").get<std::size_t>();
    }

    std::string command = validate_cmd->parsed()  ? "validate-theory"
                          : dynamics_cmd->parsed() ? "dynamics"
                          : gas_cmd->parsed()      ? "gas-landscape"
                          : bench_cmd->parsed()    ? "bench"
                                                   : "report";
    (void)report_cmd;

    std::filesystem::create_directories(cfg.out);
    detail::write_json(cfg.out / "resolved_config.json", detail::resolved_config(cfg, command));

    if (command == "validate-theory") return cmd_validate_theory(cfg, out, err);
    if (command == "dynamics") return cmd_dynamics(cfg, out, err);
    if (command == "gas-landscape") return cmd_gas_landscape(cfg, out, err);
    if (command == "bench") return cmd_bench(cfg, out, err);
    return cmd_report(cfg, out, err);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace jascl::cli
