#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "jascl/common.hpp"
#include "jascl/rng.hpp"

namespace jascl::gas {

/// Running sum of squared gradients for one weight matrix. Reset at the start
/// of each training session; accumulation is single-writer.
struct GradientBuffer {
  Matrix sums;
  std::size_t step_count = 0;
  double epsilon = 1e-8;

  GradientBuffer() = default;
  GradientBuffer(std::size_t rows, std::size_t cols, double eps = 1e-8)
      : sums(rows, cols, 0.0), epsilon(eps) {
    require(epsilon > 0.0, "GradientBuffer: epsilon must be positive");
  }

  bool empty() const { return sums.size() == 0; }

  void accumulate(const Matrix& gradients) {
    require_shape(sums.same_shape(gradients), "GradientBuffer::accumulate: shape mismatch");
    for (std::size_t i = 0; i < sums.size(); ++i) {
      sums.data[i] += gradients.data[i] * gradients.data[i];
    }
    ++step_count;
  }
};

/// Value-returning form of buffer accumulation.
inline GradientBuffer accumulate(GradientBuffer buffer, const Matrix& gradients) {
  buffer.accumulate(gradients);
  return buffer;
}

/// Per-parameter noise scales in (0, 1]; the entry with the smallest
/// accumulated squared gradient is exactly 1.
struct NoiseScaleVector {
  Matrix scales;
};

/// Normalized inverse-gradient noise scales:
///   G_inv = 1 / (sums + eps)
///   scale = (1 + G_inv - min(G_inv)) / (1 + max(G_inv) - min(G_inv))
/// The argmax entry divides an expression by itself, so its scale is exactly
/// 1.0 in floating point, not merely close to it.
inline NoiseScaleVector noise_scales(const GradientBuffer& buffer) {
  if (buffer.empty()) throw StateError("noise_scales: empty gradient buffer");
  const Matrix& g = buffer.sums;
  std::vector<double> inv(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) inv[i] = 1.0 / (g.data[i] + buffer.epsilon);
  auto [lo_it, hi_it] = std::minmax_element(inv.begin(), inv.end());
  double lo = *lo_it, hi = *hi_it;
  double denom = 1.0 + hi - lo;
  NoiseScaleVector out{Matrix(g.rows, g.cols)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.scales.data[i] = (1.0 + inv[i] - lo) / denom;
  }
  return out;
}

/// W + scales (.) xi with xi iid standard normal drawn from the given stream.
inline Matrix perturb(const Matrix& weights, const NoiseScaleVector& scales, RngStream& rng) {
  require_shape(weights.same_shape(scales.scales), "perturb: shape mismatch");
  Matrix out = weights;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] += scales.scales.data[i] * rng.normal();
  }
  return out;
}

/// Seed-addressed form: the draw depends only on the seed and entry order.
inline Matrix perturb(const Matrix& weights, const NoiseScaleVector& scales,
                      std::uint64_t rng_seed) {
  RngStream rng(rng_seed);
  return perturb(weights, scales, rng);
}

/// Diagonal quadratic loss landscape: eigenvalues of the Hessian in its
/// eigenbasis, sorted descending, plus the optimum.
struct QuadraticLandscape {
  std::vector<double> eigenvalues;
  std::vector<double> optimum;

  explicit QuadraticLandscape(std::vector<double> eigs, std::vector<double> opt = {})
      : eigenvalues(std::move(eigs)), optimum(std::move(opt)) {
    require(!eigenvalues.empty(), "QuadraticLandscape: needs at least one eigenvalue");
    for (double l : eigenvalues) {
      if (!(l > 0.0)) throw DomainError("QuadraticLandscape: eigenvalues must be positive");
    }
    std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<double>());
    if (optimum.empty()) optimum.assign(eigenvalues.size(), 0.0);
    require_shape(optimum.size() == eigenvalues.size(),
                  "QuadraticLandscape: optimum dimension mismatch");
  }

  std::size_t dim() const { return eigenvalues.size(); }
  double lambda_max() const { return eigenvalues.front(); }
  double lambda_min() const { return eigenvalues.back(); }
  double lambda_mean() const {
    double s = 0.0;
    for (double l : eigenvalues) s += l;
    return s / static_cast<double>(eigenvalues.size());
  }
  double condition_number() const { return lambda_max() / lambda_min(); }
};

/// Exact expected loss increase at the optimum of a quadratic under
/// independent per-coordinate noise: (1/2) sum_i lambda_i * scale_i^2.
inline double expected_quadratic_increase(const QuadraticLandscape& landscape,
                                          const std::vector<double>& scales) {
  require_shape(scales.size() == landscape.dim(),
                "expected_quadratic_increase: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    acc += landscape.eigenvalues[i] * scales[i] * scales[i];
  }
  return 0.5 * acc;
}

/// GAS per-coordinate scales under the total budget sum(s_i^2) = rho^2,
/// allocated inversely to curvature: s_i^2 = rho^2 / (lambda_i sum_j 1/lambda_j).
inline std::vector<double> budgeted_scales(const QuadraticLandscape& landscape,
                                           double rho_radius) {
  require(rho_radius > 0.0, "budgeted_scales: rho_radius must be positive");
  double inv_sum = 0.0;
  for (double l : landscape.eigenvalues) inv_sum += 1.0 / l;
  std::vector<double> s(landscape.dim());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::sqrt(rho_radius * rho_radius / (landscape.eigenvalues[i] * inv_sum));
  }
  return s;
}

struct AdversarialComparison {
  double delta_adv = 0.0;  // worst-case increase over the l2 ball of radius rho
  double delta_gas = 0.0;  // expected increase under budget-matched GAS noise
  double ratio = 0.0;      // delta_adv / delta_gas, in [1, kappa]
};

/// One-step flatness comparison: the adversary spends the whole budget on the
/// top curvature direction, GAS spreads it inversely to curvature.
inline AdversarialComparison adversarial_comparison(const QuadraticLandscape& landscape,
                                                    double rho_radius) {
  require(rho_radius > 0.0, "adversarial_comparison: rho_radius must be positive");
  double inv_sum = 0.0;
  for (double l : landscape.eigenvalues) inv_sum += 1.0 / l;
  AdversarialComparison out;
  out.delta_adv = 0.5 * rho_radius * rho_radius * landscape.lambda_max();
  out.delta_gas =
      rho_radius * rho_radius * static_cast<double>(landscape.dim()) / (2.0 * inv_sum);
  out.ratio = out.delta_adv / out.delta_gas;
  return out;
}

}  // namespace jascl::gas
