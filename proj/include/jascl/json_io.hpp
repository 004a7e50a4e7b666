#pragma once

#include <string>

#include "jascl/bench/metrics.hpp"
#include "jascl/bench/runner.hpp"
#include "jascl/gas.hpp"
#include "jascl/numerics.hpp"
#include "jascl/pas.hpp"

#include <json.hpp>

namespace jascl::numerics {

/// Flat object with keys kl_gas, kl_iso, kl_static, kl_memory, fisher_variance;
/// absent modes are omitted.
inline void to_json(nlohmann::json& j, const KlComparisonReport& r) {
  j = nlohmann::json{{"kl_gas", r.kl_gas},
                     {"kl_iso", r.kl_iso},
                     {"fisher_variance", r.fisher_variance}};
  if (r.kl_static) j["kl_static"] = *r.kl_static;
  if (r.kl_memory) j["kl_memory"] = *r.kl_memory;
}

}  // namespace jascl::numerics

namespace jascl::gas {

inline void to_json(nlohmann::json& j, const NoiseScaleVector& v) {
  j = nlohmann::json{{"rows", v.scales.rows}, {"cols", v.scales.cols},
                     {"data", v.scales.data}};
}

inline void to_json(nlohmann::json& j, const QuadraticLandscape& l) {
  j = nlohmann::json{{"eigenvalues", l.eigenvalues}, {"optimum", l.optimum}};
}

}  // namespace jascl::gas

namespace jascl::pas {

/// {class_id: {"vector": [...], "count": n}} with class ids as object keys.
inline void to_json(nlohmann::json& j, const PrototypeBank& bank) {
  j = nlohmann::json::object();
  for (const auto& [cid, entry] : bank.classes) {
    j[std::to_string(cid)] = {{"vector", entry.prototype}, {"count", entry.count}};
  }
}

inline void from_json(const nlohmann::json& j, PrototypeBank& bank) {
  bank.classes.clear();
  for (const auto& [key, value] : j.items()) {
    PrototypeBank::Entry entry;
    entry.prototype = value.at("vector").get<std::vector<double>>();
    entry.count = value.at("count").get<std::size_t>();
    bank.classes.emplace(std::stoi(key), std::move(entry));
  }
}

}  // namespace jascl::pas

namespace jascl::bench {

inline void to_json(nlohmann::json& j, const ClassScore& s) {
  j = nlohmann::json{{"dice", s.dice},
                     {"iou", s.iou},
                     {"truth_pixels", s.truth_pixels},
                     {"predicted_pixels", s.predicted_pixels},
                     {"intersection", s.intersection}};
}

inline void to_json(nlohmann::json& j, const MetricsReport& r) {
  j = nlohmann::json{{"session", r.session},
                     {"mean_dice", r.mean_dice},
                     {"mean_iou", r.mean_iou}};
  if (r.background_dice) j["background_dice"] = *r.background_dice;
  if (r.seen_dice) j["seen_dice"] = *r.seen_dice;
  if (r.new_dice) j["new_dice"] = *r.new_dice;
  if (r.harmonic_dice) j["harmonic_dice"] = *r.harmonic_dice;
  if (r.total_drop_percent) j["total_drop_percent"] = *r.total_drop_percent;
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [cid, score] : r.per_class) per_class[std::to_string(cid)] = score;
  j["per_class"] = per_class;
  nlohmann::json per_session = nlohmann::json::object();
  for (const auto& [t, scores] : r.per_test_session) {
    nlohmann::json entry = nlohmann::json::object();
    for (const auto& [cid, score] : scores) entry[std::to_string(cid)] = score;
    per_session[std::to_string(t)] = entry;
  }
  j["per_test_session"] = per_session;
}

inline void to_json(nlohmann::json& j, const CellResult& c) {
  j = nlohmann::json{{"config", c.config},
                     {"seed", c.seed},
                     {"trajectory", c.trajectory},
                     {"session_reports", c.session_reports}};
  if (std::isfinite(c.drop_percent)) j["total_drop_percent"] = c.drop_percent;
}

inline void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = nlohmann::json{{"cells", r.cells}};

  // Per-config aggregates over seeds.
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
  std::map<std::string, std::pair<double, std::size_t>> drops;
  for (const auto& cell : r.cells) {
    auto& [traj, n] = sums[cell.config];
    if (traj.size() < cell.trajectory.size()) traj.resize(cell.trajectory.size(), 0.0);
    for (std::size_t t = 0; t < cell.trajectory.size(); ++t) traj[t] += cell.trajectory[t];
    ++n;
    if (std::isfinite(cell.drop_percent)) {
      drops[cell.config].first += cell.drop_percent;
      drops[cell.config].second += 1;
    }
  }
  nlohmann::json aggregates = nlohmann::json::object();
  for (const auto& [name, acc] : sums) {
    std::vector<double> mean = acc.first;
    for (auto& v : mean) v /= static_cast<double>(acc.second);
    nlohmann::json entry{{"cells", acc.second}, {"mean_trajectory", mean}};
    auto it = drops.find(name);
    if (it != drops.end() && it->second.second > 0) {
      entry["mean_total_drop_percent"] =
          it->second.first / static_cast<double>(it->second.second);
    }
    aggregates[name] = entry;
  }
  j["aggregates"] = aggregates;
}

/// Flat CSV rows (config, seed, session, class, dice, iou) over pooled scores.
inline std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "config,seed,session,class,dice,iou\n";
  char buf[192];
  for (const auto& cell : report.cells) {
    for (const auto& metrics : cell.session_reports) {
      for (const auto& [cid, score] : metrics.per_class) {
        std::snprintf(buf, sizeof(buf), "%s,%llu,%d,%d,%.6f,%.6f\n", cell.config.c_str(),
                      static_cast<unsigned long long>(cell.seed), metrics.session, cid,
                      score.dice, score.iou);
        out += buf;
      }
    }
  }
  return out;
}

}  // namespace jascl::bench
