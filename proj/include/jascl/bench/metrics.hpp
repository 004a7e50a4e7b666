#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "jascl/bench/dataset.hpp"
#include "jascl/bench/model.hpp"
#include "jascl/bench/protocol.hpp"
#include "jascl/common.hpp"

namespace jascl::bench {

struct ClassScore {
  double dice = 0.0;
  double iou = 0.0;
  std::size_t truth_pixels = 0;
  std::size_t predicted_pixels = 0;
  std::size_t intersection = 0;
};

struct MetricsReport {
  int session = 0;  // report produced after training this session
  // Pooled over the test sets of sessions 0..session; classes absent from
  // both prediction and truth are excluded entirely.
  std::map<int, ClassScore> per_class;
  // Same statistic restricted to each session's own test set.
  std::map<int, std::map<int, ClassScore>> per_test_session;

  double mean_dice = 0.0;  // over non-background classes in per_class
  double mean_iou = 0.0;
  std::optional<double> background_dice;  // reported separately

  std::optional<double> seen_dice;      // classes introduced before `session`
  std::optional<double> new_dice;       // classes introduced at `session`
  std::optional<double> harmonic_dice;  // harmonic mean of the two

  // Accumulated forgetting over the score trajectory up to this session;
  // stamped by the protocol runner, absent for standalone evaluations.
  std::optional<double> total_drop_percent;
};

namespace detail {

struct Counts {
  std::size_t truth = 0;
  std::size_t predicted = 0;
  std::size_t inter = 0;
};

inline ClassScore score_from_counts(const Counts& c) {
  ClassScore s;
  s.truth_pixels = c.truth;
  s.predicted_pixels = c.predicted;
  s.intersection = c.inter;
  double denom_dice = static_cast<double>(c.truth + c.predicted);
  s.dice = denom_dice > 0.0 ? 2.0 * static_cast<double>(c.inter) / denom_dice : 0.0;
  double uni = static_cast<double>(c.truth + c.predicted - c.inter);
  s.iou = uni > 0.0 ? static_cast<double>(c.inter) / uni : 0.0;
  return s;
}

}  // namespace detail

/// Per-class Dice/IoU over pooled prediction/truth grid pairs. Classes absent
/// from both sides are excluded.
inline std::map<int, ClassScore> class_scores(
    const std::vector<std::pair<Grid<int>, Grid<int>>>& pred_truth_pairs) {
  std::map<int, detail::Counts> counts;
  for (const auto& [pred, truth] : pred_truth_pairs) {
    require_shape(pred.same_shape(truth), "class_scores: grid shape mismatch");
    for (std::size_t i = 0; i < pred.size(); ++i) {
      int p = pred.data[i];
      int y = truth.data[i];
      ++counts[y].truth;
      ++counts[p].predicted;
      if (p == y) ++counts[y].inter;
    }
  }
  std::map<int, ClassScore> out;
  for (const auto& [cid, c] : counts) {
    if (c.truth == 0 && c.predicted == 0) continue;
    out[cid] = detail::score_from_counts(c);
  }
  return out;
}

/// Dice / mIoU over the test sets of sessions 0..t, with the seen/new/harmonic
/// breakdown defined by the protocol's class introduction order.
inline MetricsReport evaluate(const PixelClassifierModel& model,
                              const std::vector<SessionData>& data,
                              const ContinualProtocol& protocol, std::size_t upto_session) {
  require(upto_session < data.size() && upto_session < protocol.sessions.size(),
          "evaluate: session index out of range");
  for (std::size_t t = 0; t <= upto_session; ++t) {
    require(!data[t].test.empty(), "evaluate: empty test set");
  }

  MetricsReport report;
  report.session = static_cast<int>(upto_session);

  std::map<int, detail::Counts> pooled;
  for (std::size_t t = 0; t <= upto_session; ++t) {
    std::map<int, detail::Counts> local;
    for (const auto& sample : data[t].test) {
      Grid<int> pred = model.predict(sample.pixels);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        int y = sample.labels.data[i];
        int p = pred.data[i];
        ++local[y].truth;
        ++local[p].predicted;
        if (y == p) ++local[y].inter;
      }
    }
    auto& session_scores = report.per_test_session[static_cast<int>(t)];
    for (const auto& [cid, counts] : local) {
      if (counts.truth == 0 && counts.predicted == 0) continue;
      session_scores[cid] = detail::score_from_counts(counts);
      auto& agg = pooled[cid];
      agg.truth += counts.truth;
      agg.predicted += counts.predicted;
      agg.inter += counts.inter;
    }
  }

  std::set<int> seen_classes = protocol.classes_before(upto_session);
  const auto& new_ids = protocol.sessions[upto_session].class_ids;
  std::set<int> new_classes(new_ids.begin(), new_ids.end());

  double sum_dice = 0.0, sum_iou = 0.0;
  std::size_t n = 0;
  double sum_seen = 0.0, sum_new = 0.0;
  std::size_t n_seen = 0, n_new = 0;
  for (const auto& [cid, counts] : pooled) {
    if (counts.truth == 0 && counts.predicted == 0) continue;
    ClassScore s = detail::score_from_counts(counts);
    report.per_class[cid] = s;
    if (cid == 0) {
      report.background_dice = s.dice;
      continue;
    }
    sum_dice += s.dice;
    sum_iou += s.iou;
    ++n;
    if (seen_classes.count(cid)) {
      sum_seen += s.dice;
      ++n_seen;
    }
    if (new_classes.count(cid)) {
      sum_new += s.dice;
      ++n_new;
    }
  }
  report.mean_dice = n > 0 ? sum_dice / static_cast<double>(n) : 0.0;
  report.mean_iou = n > 0 ? sum_iou / static_cast<double>(n) : 0.0;
  if (n_seen > 0) report.seen_dice = sum_seen / static_cast<double>(n_seen);
  if (n_new > 0) report.new_dice = sum_new / static_cast<double>(n_new);
  if (report.seen_dice && report.new_dice) {
    double a = *report.seen_dice, b = *report.new_dice;
    report.harmonic_dice = (a + b) > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
  }
  return report;
}

/// Total Drop: accumulated session-to-session decreases of a score trajectory,
/// as a percentage of the base-session score.
inline double total_drop(const std::vector<double>& session_scores) {
  require(!session_scores.empty(), "total_drop: empty trajectory");
  for (double s : session_scores) {
    require(s >= 0.0 && s <= 1.0, "total_drop: scores must lie in [0,1]");
  }
  require(session_scores.front() > 0.0, "total_drop: base score must be positive");
  double drops = 0.0;
  for (std::size_t i = 0; i + 1 < session_scores.size(); ++i) {
    drops += std::max(0.0, session_scores[i] - session_scores[i + 1]);
  }
  return 100.0 * drops / session_scores.front();
}

}  // namespace jascl::bench
