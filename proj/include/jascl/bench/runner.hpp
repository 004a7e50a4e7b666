#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "jascl/bench/dataset.hpp"
#include "jascl/bench/metrics.hpp"
#include "jascl/bench/model.hpp"
#include "jascl/bench/protocol.hpp"
#include "jascl/bench/trainer.hpp"
#include "jascl/common.hpp"
#include "jascl/pas.hpp"
#include "jascl/rng.hpp"

namespace jascl::bench {

struct NamedConfig {
  std::string name;
  TrainConfig train;
};

/// The ablation matrix: vanilla, each mechanism alone, and the full method.
/// Prototype replay rides with PAS (it needs the prototype bank).
inline std::vector<NamedConfig> standard_config_matrix(TrainConfig base) {
  std::vector<NamedConfig> out;
  TrainConfig vanilla = base;
  vanilla.gas = vanilla.pas = vanilla.replay = false;
  out.push_back({"vanilla", vanilla});

  TrainConfig gas_only = vanilla;
  gas_only.gas = true;
  out.push_back({"gas-only", gas_only});

  TrainConfig pas_only = vanilla;
  pas_only.pas = true;
  pas_only.replay = true;
  out.push_back({"pas-only", pas_only});

  TrainConfig jascl = vanilla;
  jascl.gas = true;
  jascl.pas = true;
  jascl.replay = true;
  out.push_back({"jascl", jascl});
  return out;
}

struct RunnerOptions {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t random_filters = 21;  // feature dim = 3 + this
  std::size_t base_epochs = 30;
  std::size_t incremental_epochs = 12;
  std::size_t jobs = 1;
};

struct CellResult {
  std::string config;
  std::uint64_t seed = 0;
  std::vector<MetricsReport> session_reports;  // after each session
  std::vector<TrainLog> session_logs;
  std::vector<double> trajectory;  // pooled mean Dice after each session
  double drop_percent = 0.0;
};

struct ComparisonReport {
  std::vector<CellResult> cells;

  const CellResult* find(const std::string& config, std::uint64_t seed) const {
    for (const auto& c : cells) {
      if (c.config == config && c.seed == seed) return &c;
    }
    return nullptr;
  }
};

/// One (config, seed) cell: datasets and model init depend only on the seed,
/// so every config trains the identical base model; incremental mechanisms
/// engage from session 1 onward.
inline CellResult run_cell(const ContinualProtocol& protocol, const NamedConfig& config,
                           std::uint64_t seed, const RunnerOptions& opts) {
  CellResult cell;
  cell.config = config.name;
  cell.seed = seed;

  auto data = generate_protocol_data(protocol, opts.height, opts.width, seed);
  RngRoot root(seed);
  std::size_t base_classes =
      static_cast<std::size_t>(protocol.sessions[0].class_ids.back()) + 1;
  PixelClassifierModel model =
      PixelClassifierModel::create(base_classes, opts.random_filters, root.child("bench"));

  pas::PrototypeBank bank;
  for (std::size_t t = 0; t < protocol.sessions.size(); ++t) {
    TrainConfig cfg = config.train;
    cfg.epochs = t == 0 ? opts.base_epochs : opts.incremental_epochs;
    if (t == 0) {
      cfg.gas = false;
      cfg.pas = false;
      cfg.replay = false;
    } else {
      std::size_t needed = static_cast<std::size_t>(protocol.sessions[t].class_ids.back()) + 1;
      RngStream grow = root.child("bench/extend").stream("session" + std::to_string(t));
      model.extend_classes(needed, grow);
    }
    RngRoot session_root = root.child("bench/session" + std::to_string(t));
    TrainResult result = train_session(model, data[t], bank, cfg, session_root);
    model = std::move(result.model);
    bank.merge(result.session_prototypes);
    cell.session_logs.push_back(std::move(result.log));

    MetricsReport report = evaluate(model, data, protocol, t);
    cell.trajectory.push_back(report.mean_dice);
    if (cell.trajectory.front() > 0.0) {
      report.total_drop_percent = total_drop(cell.trajectory);
    }
    cell.session_reports.push_back(std::move(report));
  }
  cell.drop_percent =
      cell.trajectory.front() > 0.0 ? total_drop(cell.trajectory) : std::nan("");
  return cell;
}

/// Every (config, seed) cell, optionally in parallel. Cells are fully
/// independent (own data, own RNG streams); results merge by index, so the
/// report is deterministic regardless of the job count.
inline ComparisonReport run_protocol(const ContinualProtocol& protocol,
                                     const std::vector<NamedConfig>& configs,
                                     const std::vector<std::uint64_t>& seeds,
                                     const RunnerOptions& opts) {
  require(!seeds.empty(), "run_protocol: needs at least one seed");
  require(!configs.empty(), "run_protocol: needs at least one config");

  struct Job {
    const NamedConfig* config;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& c : configs) {
    for (auto s : seeds) jobs.push_back({&c, s});
  }

  ComparisonReport report;
  report.cells.resize(jobs.size());
  std::size_t workers = std::max<std::size_t>(1, std::min(opts.jobs, jobs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      report.cells[i] = run_cell(protocol, *jobs[i].config, jobs[i].seed, opts);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) return;
          report.cells[i] = run_cell(protocol, *jobs[i].config, jobs[i].seed, opts);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return report;
}

}  // namespace jascl::bench
