#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "jascl/bench/dataset.hpp"
#include "jascl/common.hpp"
#include "jascl/rng.hpp"

namespace jascl::bench {

/// Fixed, seeded per-pixel feature extractor: raw intensity, local 3x3 mean
/// and standard deviation, plus a bank of tanh-squashed random 3x3 filters.
/// Never trained; incremental sessions adapt only the classifier.
class Featurizer {
 public:
  static Featurizer create(std::size_t random_filters, const RngRoot& root) {
    Featurizer f;
    RngStream rng = root.stream("featurizer/filters");
    f.filters_.resize(random_filters);
    for (auto& filt : f.filters_) {
      for (double& w : filt) w = rng.normal() / 3.0;
    }
    return f;
  }

  std::size_t dim() const { return 3 + filters_.size(); }

  Tensor3 features(const Grid<std::uint8_t>& image) const {
    const std::size_t H = image.height, W = image.width;
    Tensor3 out(dim(), H, W);
    auto pixel = [&](long y, long x) {
      y = std::clamp<long>(y, 0, static_cast<long>(H) - 1);
      x = std::clamp<long>(x, 0, static_cast<long>(W) - 1);
      return static_cast<double>(image(static_cast<std::size_t>(y),
                                       static_cast<std::size_t>(x))) /
             255.0;
    };
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t x = 0; x < W; ++x) {
        double raw = pixel(static_cast<long>(y), static_cast<long>(x));
        double sum = 0.0, sumsq = 0.0;
        std::vector<double> responses(filters_.size(), 0.0);
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            double v = pixel(static_cast<long>(y) + dy, static_cast<long>(x) + dx);
            sum += v;
            sumsq += v * v;
            std::size_t tap = static_cast<std::size_t>((dy + 1) * 3 + (dx + 1));
            for (std::size_t k = 0; k < filters_.size(); ++k) {
              responses[k] += filters_[k][tap] * v;
            }
          }
        }
        double mean = sum / 9.0;
        double var = std::max(0.0, sumsq / 9.0 - mean * mean);
        out(0, y, x) = raw;
        out(1, y, x) = mean;
        out(2, y, x) = std::sqrt(var);
        for (std::size_t k = 0; k < filters_.size(); ++k) {
          out(3 + k, y, x) = std::tanh(responses[k]);
        }
      }
    }
    return out;
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a("featurizer", 10);
    for (const auto& filt : filters_) {
      h = fnv1a(filt.data(), filt.size() * sizeof(double), h);
    }
    return h;
  }

 private:
  std::vector<std::array<double, 9>> filters_;
};

/// Per-pixel linear softmax classifier over fixed features.
struct PixelClassifierModel {
  Featurizer featurizer;
  Matrix weights;             // C x D
  std::vector<double> bias;   // C
  bool featurizer_frozen = true;

  static PixelClassifierModel create(std::size_t num_classes, std::size_t random_filters,
                                     const RngRoot& root) {
    PixelClassifierModel m;
    m.featurizer = Featurizer::create(random_filters, root);
    m.weights = Matrix(num_classes, m.featurizer.dim(), 0.0);
    m.bias.assign(num_classes, 0.0);
    RngStream rng = root.stream("model/init");
    for (double& w : m.weights.data) w = 0.01 * rng.normal();
    return m;
  }

  /// Class-incremental growth: append rows for newly introduced classes.
  /// Existing rows keep their values; only rows up to the largest class id
  /// seen so far exist, so no untrained "future" row ever competes in the
  /// softmax or skews the gas buffer normalization.
  void extend_classes(std::size_t new_num_classes, RngStream& rng) {
    if (new_num_classes <= weights.rows) return;
    Matrix grown(new_num_classes, weights.cols, 0.0);
    std::copy(weights.data.begin(), weights.data.end(), grown.data.begin());
    for (std::size_t c = weights.rows; c < new_num_classes; ++c) {
      for (std::size_t d = 0; d < weights.cols; ++d) grown(c, d) = 0.01 * rng.normal();
    }
    weights = std::move(grown);
    bias.resize(new_num_classes, 0.0);
  }

  std::size_t num_classes() const { return weights.rows; }
  std::size_t feature_dim() const { return weights.cols; }

  /// C x H x W logits for precomputed features under explicit parameters
  /// (lets the trainer forward through transiently perturbed weights and
  /// through the teacher's parameters).
  static Tensor3 logits_for(const Tensor3& features, const Matrix& w,
                            const std::vector<double>& bias_vec) {
    require_shape(features.channels == w.cols && bias_vec.size() == w.rows,
                  "logits_for: parameter dimension mismatch");
    const std::size_t C = w.rows, H = features.height, W = features.width;
    Tensor3 out(C, H, W);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
          double z = bias_vec[c];
          for (std::size_t d = 0; d < features.channels; ++d) {
            z += w(c, d) * features(d, y, x);
          }
          out(c, y, x) = z;
        }
      }
    }
    return out;
  }

  Tensor3 logits(const Tensor3& features) const { return logits_for(features, weights, bias); }

  Grid<int> predict(const Grid<std::uint8_t>& image) const {
    Tensor3 feats = featurizer.features(image);
    Tensor3 z = logits(feats);
    Grid<int> out(z.height, z.width, 0);
    for (std::size_t y = 0; y < z.height; ++y) {
      for (std::size_t x = 0; x < z.width; ++x) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < z.channels; ++c) {
          if (z(c, y, x) > z(best, y, x)) best = c;
        }
        out(y, x) = static_cast<int>(best);
      }
    }
    return out;
  }
};

}  // namespace jascl::bench
