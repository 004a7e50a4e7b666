#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "jascl/common.hpp"

namespace jascl::pas {

/// A labeled sample's class-mean feature collapsed to zero norm. Labeled data
/// producing this is a data bug, unlike streaming features which just reject.
struct DegenerateFeatureError : DomainError {
  using DomainError::DomainError;
};

/// Per-pixel D-dimensional embedding, D x H x W.
struct FeatureMap {
  Tensor3 features;

  explicit FeatureMap(Tensor3 f) : features(std::move(f)) {
    require(features.channels >= 1 && features.height >= 1 && features.width >= 1,
            "FeatureMap: empty tensor");
    for (double v : features.data) {
      if (!std::isfinite(v)) throw DomainError("FeatureMap: entries must be finite");
    }
  }

  std::size_t dim() const { return features.channels; }
  std::size_t height() const { return features.height; }
  std::size_t width() const { return features.width; }

  std::vector<double> at(std::size_t y, std::size_t x) const {
    std::vector<double> v(features.channels);
    for (std::size_t d = 0; d < features.channels; ++d) v[d] = features(d, y, x);
    return v;
  }
};

/// Class anchors: average of per-sample l2-normalized class-mean features.
/// Built once per session, then immutable.
struct PrototypeBank {
  struct Entry {
    std::vector<double> prototype;
    std::size_t count = 0;  // contributing samples
  };
  std::map<int, Entry> classes;

  bool empty() const { return classes.empty(); }
  bool has(int class_id) const { return classes.count(class_id) != 0; }

  const Entry& at(int class_id) const { return classes.at(class_id); }

  /// Merge another bank's classes into this one; overlapping class ids are
  /// combined by count-weighted averaging of the (already averaged) anchors.
  void merge(const PrototypeBank& other) {
    for (const auto& [cid, entry] : other.classes) {
      auto it = classes.find(cid);
      if (it == classes.end()) {
        classes.emplace(cid, entry);
      } else {
        Entry& mine = it->second;
        require_shape(mine.prototype.size() == entry.prototype.size(),
                      "PrototypeBank::merge: feature dimension mismatch");
        double total = static_cast<double>(mine.count + entry.count);
        for (std::size_t d = 0; d < mine.prototype.size(); ++d) {
          mine.prototype[d] = (mine.prototype[d] * static_cast<double>(mine.count) +
                               entry.prototype[d] * static_cast<double>(entry.count)) /
                              total;
        }
        mine.count += entry.count;
      }
    }
  }
};

/// Dual acceptance thresholds; 0.7/0.7 is the standard operating point.
struct FilterConfig {
  double tau_conf = 0.7;
  double tau_sim = 0.7;

  FilterConfig() = default;
  FilterConfig(double conf, double sim) : tau_conf(conf), tau_sim(sim) {
    require(tau_conf >= 0.0 && tau_conf <= 1.0, "FilterConfig: tau_conf outside [0,1]");
    require(tau_sim >= -1.0 && tau_sim <= 1.0, "FilterConfig: tau_sim outside [-1,1]");
  }
};

struct ValidityMask {
  Grid<std::uint8_t> mask;
  std::size_t accepted_count = 0;

  ValidityMask() = default;
  explicit ValidityMask(Grid<std::uint8_t> m) : mask(std::move(m)) {
    for (auto v : mask.data) accepted_count += (v != 0);
  }
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/// Stable per-pixel softmax of logits(.., y, x) into probs.
inline void softmax_pixel(const Tensor3& logits, std::size_t y, std::size_t x,
                          std::vector<double>& probs) {
  const std::size_t C = logits.channels;
  double mx = logits(0, y, x);
  for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, logits(c, y, x));
  double sum = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    probs[c] = std::exp(logits(c, y, x) - mx);
    sum += probs[c];
  }
  for (std::size_t c = 0; c < C; ++c) probs[c] /= sum;
}

}  // namespace detail

/// One labeled sample: features plus an aligned class-id grid.
struct LabeledFeatures {
  FeatureMap features;
  Grid<int> labels;
};

/// Class prototypes P_c: per-sample class-mean features, l2-normalized per
/// sample, then averaged over the samples containing the class. The average is
/// deliberately not re-normalized; cosine similarity is scale-invariant.
inline PrototypeBank compute_prototypes(const std::vector<LabeledFeatures>& samples) {
  PrototypeBank bank;
  std::map<int, std::vector<double>> sums;
  std::map<int, std::size_t> counts;

  for (const auto& sample : samples) {
    const FeatureMap& fm = sample.features;
    require_shape(sample.labels.height == fm.height() && sample.labels.width == fm.width(),
                  "compute_prototypes: label grid does not align with features");
    const std::size_t D = fm.dim();

    std::map<int, std::vector<double>> class_sum;
    std::map<int, std::size_t> class_pixels;
    for (std::size_t y = 0; y < fm.height(); ++y) {
      for (std::size_t x = 0; x < fm.width(); ++x) {
        int c = sample.labels(y, x);
        require(c >= 0, "compute_prototypes: class ids must be nonnegative");
        auto& acc = class_sum[c];
        if (acc.empty()) acc.assign(D, 0.0);
        for (std::size_t d = 0; d < D; ++d) acc[d] += fm.features(d, y, x);
        ++class_pixels[c];
      }
    }

    for (auto& [cid, acc] : class_sum) {
      double n = static_cast<double>(class_pixels[cid]);
      for (double& v : acc) v /= n;
      double norm = detail::norm2(acc);
      if (!(norm > 0.0)) {
        throw DegenerateFeatureError("compute_prototypes: zero-norm class-mean feature");
      }
      auto& total = sums[cid];
      if (total.empty()) total.assign(D, 0.0);
      for (std::size_t d = 0; d < D; ++d) total[d] += acc[d] / norm;
      ++counts[cid];
    }
  }

  for (auto& [cid, total] : sums) {
    PrototypeBank::Entry entry;
    entry.count = counts[cid];
    entry.prototype.resize(total.size());
    for (std::size_t d = 0; d < total.size(); ++d) {
      entry.prototype[d] = total[d] / static_cast<double>(entry.count);
    }
    bank.classes.emplace(cid, std::move(entry));
  }
  return bank;
}

/// Dual-criteria pixel validation: softmax confidence and cosine similarity to
/// the predicted class's prototype, both strictly above their thresholds.
/// Pixels whose predicted class has no prototype, or whose feature has zero
/// norm, are invalid.
inline ValidityMask validate_pixels(const Tensor3& logits, const FeatureMap& features,
                                    const PrototypeBank& bank, const FilterConfig& config) {
  require(logits.channels >= 2, "validate_pixels: needs at least two classes");
  require_shape(logits.height == features.height() && logits.width == features.width(),
                "validate_pixels: logits/features spatial mismatch");

  const std::size_t C = logits.channels;
  const std::size_t D = features.dim();
  Grid<std::uint8_t> mask(logits.height, logits.width, 0);
  std::vector<double> probs(C);

  for (std::size_t y = 0; y < logits.height; ++y) {
    for (std::size_t x = 0; x < logits.width; ++x) {
      detail::softmax_pixel(logits, y, x, probs);
      std::size_t argmax = 0;
      for (std::size_t c = 1; c < C; ++c) {
        if (probs[c] > probs[argmax]) argmax = c;
      }
      double conf = probs[argmax];
      if (!(conf > config.tau_conf)) continue;

      auto it = bank.classes.find(static_cast<int>(argmax));
      if (it == bank.classes.end()) continue;
      const auto& proto = it->second.prototype;
      require_shape(proto.size() == D, "validate_pixels: prototype dimension mismatch");

      double ff = 0.0, fp = 0.0, pp = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        double f = features.features(d, y, x);
        ff += f * f;
        fp += f * proto[d];
        pp += proto[d] * proto[d];
      }
      if (!(ff > 0.0) || !(pp > 0.0)) continue;  // undefined similarity: reject
      double sim = fp / (std::sqrt(ff) * std::sqrt(pp));
      if (sim > config.tau_sim) mask(y, x) = 1;
    }
  }
  return ValidityMask(std::move(mask));
}

/// Mean squared l2 distance between probability vectors over the pixels
/// validated by both sides; 0 when that intersection is empty (few-shot early
/// training legitimately rejects everything).
inline double consistency_loss(const Tensor3& probs_student, const Tensor3& probs_teacher,
                               const ValidityMask& mask_student,
                               const ValidityMask& mask_teacher) {
  require_shape(probs_student.same_shape(probs_teacher), "consistency_loss: shape mismatch");
  require_shape(mask_student.mask.height == probs_student.height &&
                    mask_student.mask.width == probs_student.width &&
                    mask_student.mask.same_shape(mask_teacher.mask),
                "consistency_loss: mask shape mismatch");

  const std::size_t C = probs_student.channels;
  double acc = 0.0;
  std::size_t joint = 0;
  for (std::size_t y = 0; y < probs_student.height; ++y) {
    for (std::size_t x = 0; x < probs_student.width; ++x) {
      if (!mask_student.mask(y, x) || !mask_teacher.mask(y, x)) continue;
      ++joint;
      for (std::size_t c = 0; c < C; ++c) {
        double d = probs_student(c, y, x) - probs_teacher(c, y, x);
        acc += d * d;
      }
    }
  }
  if (joint == 0) return 0.0;
  return acc / static_cast<double>(joint);
}

/// alpha * teacher + (1 - alpha) * student.
inline std::vector<double> ema_update(const std::vector<double>& teacher_params,
                                      const std::vector<double>& student_params,
                                      double alpha) {
  require(alpha >= 0.0 && alpha < 1.0, "ema_update: alpha must lie in [0,1)");
  require_shape(teacher_params.size() == student_params.size(),
                "ema_update: dimension mismatch");
  std::vector<double> out(teacher_params.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha * teacher_params[i] + (1.0 - alpha) * student_params[i];
  }
  return out;
}

struct CoveragePrecision {
  double f = 0.0;    // accepted / total pixels
  double rho = 1.0;  // correct / accepted; 1.0 and vacuous when none accepted
  bool vacuous = false;
};

inline CoveragePrecision estimate_coverage_precision(const ValidityMask& mask,
                                                     const Grid<int>& predicted,
                                                     const Grid<int>& truth) {
  require_shape(mask.mask.height == predicted.height && mask.mask.width == predicted.width &&
                    predicted.same_shape(truth),
                "estimate_coverage_precision: grid shape mismatch");
  std::size_t total = mask.mask.size();
  std::size_t accepted = 0, correct = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (!mask.mask.data[i]) continue;
    ++accepted;
    if (predicted.data[i] == truth.data[i]) ++correct;
  }
  CoveragePrecision out;
  out.f = total == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(total);
  if (accepted == 0) {
    out.rho = 1.0;
    out.vacuous = true;
  } else {
    out.rho = static_cast<double>(correct) / static_cast<double>(accepted);
  }
  return out;
}

/// Prototype replay at the classifier: mean cross-entropy of
/// softmax(classifier_weights * P_c) against class c over the bank.
inline double prototype_replay_loss(const PrototypeBank& bank, const Matrix& classifier_weights) {
  require(!bank.empty(), "prototype_replay_loss: empty prototype bank");
  const std::size_t C = classifier_weights.rows;
  const std::size_t D = classifier_weights.cols;

  double acc = 0.0;
  for (const auto& [cid, entry] : bank.classes) {
    if (cid < 0 || static_cast<std::size_t>(cid) >= C) {
      throw DomainError("prototype_replay_loss: class id out of classifier range");
    }
    require_shape(entry.prototype.size() == D,
                  "prototype_replay_loss: prototype dimension mismatch");
    std::vector<double> logits(C, 0.0);
    for (std::size_t r = 0; r < C; ++r) {
      for (std::size_t d = 0; d < D; ++d) {
        logits[r] += classifier_weights(r, d) * entry.prototype[d];
      }
    }
    double mx = logits[0];
    for (double z : logits) mx = std::max(mx, z);
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - mx);
    acc += (mx + std::log(sum)) - logits[static_cast<std::size_t>(cid)];
  }
  return acc / static_cast<double>(bank.classes.size());
}

}  // namespace jascl::pas
