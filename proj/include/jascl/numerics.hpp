#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "jascl/common.hpp"

namespace jascl::numerics {

/// Diagonal Gaussian N(mean, diag(variance)). Immutable after construction.
struct DiagonalGaussian {
  std::vector<double> mean;
  std::vector<double> variance;

  DiagonalGaussian(std::vector<double> mu, std::vector<double> var)
      : mean(std::move(mu)), variance(std::move(var)) {
    require_shape(mean.size() == variance.size(),
                  "DiagonalGaussian: mean/variance dimension mismatch");
    require(!mean.empty(), "DiagonalGaussian: dimension must be >= 1");
    for (double v : variance) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("DiagonalGaussian: variance entries must be strictly positive");
    }
  }

  std::size_t dim() const { return mean.size(); }

  static DiagonalGaussian standard(std::size_t d) {
    return DiagonalGaussian(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
  }
};

/// Strictly positive Fisher diagonal, optionally with certified bounds.
struct FisherDiagonal {
  std::vector<double> values;
  std::optional<double> f_min;
  std::optional<double> f_max;

  explicit FisherDiagonal(std::vector<double> v,
                          std::optional<double> lo = std::nullopt,
                          std::optional<double> hi = std::nullopt)
      : values(std::move(v)), f_min(lo), f_max(hi) {
    require(!values.empty(), "FisherDiagonal: dimension must be >= 1");
    for (double f : values) {
      if (!(f > 0.0) || !std::isfinite(f))
        throw DomainError("FisherDiagonal: entries must be strictly positive");
    }
    if (f_min || f_max) {
      double lo_v = f_min.value_or(0.0);
      double hi_v = f_max.value_or(std::numeric_limits<double>::infinity());
      require(lo_v > 0.0 && lo_v <= hi_v, "FisherDiagonal: invalid bounds");
      for (double f : values) {
        require(f >= lo_v && f <= hi_v, "FisherDiagonal: entry outside declared bounds");
      }
    }
  }

  std::size_t dim() const { return values.size(); }

  double mean() const {
    double s = 0.0;
    for (double f : values) s += f;
    return s / static_cast<double>(values.size());
  }

  /// Population variance of the diagonal entries.
  double variance() const {
    double m = mean();
    double s = 0.0;
    for (double f : values) s += (f - m) * (f - m);
    return s / static_cast<double>(values.size());
  }
};

/// f(x) = x - ln(x) - 1. Nonnegative, zero only at x = 1, strictly convex.
inline double f_ratio(double x) {
  if (!(x > 0.0)) throw DomainError("f_ratio: argument must be positive");
  return x - std::log(x) - 1.0;
}

/// KL(q || p) for diagonal Gaussians of equal dimension.
inline double kl_diag(const DiagonalGaussian& q, const DiagonalGaussian& p) {
  require_shape(q.dim() == p.dim(), "kl_diag: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    double dmu = q.mean[i] - p.mean[i];
    double ratio = q.variance[i] / p.variance[i];
    acc += dmu * dmu / p.variance[i] + ratio - std::log(ratio) - 1.0;
  }
  return 0.5 * acc;
}

/// Variance-only KL against the Laplace posterior pi = N(theta*, diag(1/F)):
/// (1/2) sum_i f(sigma_i^2 * F_ii). Means are assumed shared.
inline double kl_variance_only(const std::vector<double>& posterior_variance,
                               const FisherDiagonal& fisher) {
  require_shape(posterior_variance.size() == fisher.dim(),
                "kl_variance_only: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < fisher.dim(); ++i) {
    if (!(posterior_variance[i] > 0.0))
      throw DomainError("kl_variance_only: nonpositive posterior variance");
    acc += f_ratio(posterior_variance[i] * fisher.values[i]);
  }
  return 0.5 * acc;
}

// Posterior constructions under comparison. gas/isotropic carry the
// normalization constant c; static carries the regularization strength;
// memory carries the strength plus the (possibly stale) historical Fisher.
struct GasMode {
  double c = 1.0;
};
struct IsotropicMode {
  double c = 1.0;
};
struct StaticMode {
  double lambda = 1.0;
};
struct MemoryMode {
  double lambda = 1.0;
  std::vector<double> fisher_hist;
};

using PosteriorMode = std::variant<GasMode, IsotropicMode, StaticMode, MemoryMode>;

/// Per-parameter posterior variances for one regularization family.
inline std::vector<double> posterior_variances(const FisherDiagonal& fisher,
                                               const PosteriorMode& mode) {
  const std::size_t d = fisher.dim();
  std::vector<double> out(d);
  if (const auto* gas = std::get_if<GasMode>(&mode)) {
    require(gas->c > 0.0, "posterior_variances: gas scale c must be positive");
    for (std::size_t i = 0; i < d; ++i) out[i] = gas->c / fisher.values[i];
  } else if (const auto* iso = std::get_if<IsotropicMode>(&mode)) {
    require(iso->c > 0.0, "posterior_variances: isotropic scale c must be positive");
    double fbar = fisher.mean();
    for (std::size_t i = 0; i < d; ++i) out[i] = iso->c / fbar;
  } else if (const auto* st = std::get_if<StaticMode>(&mode)) {
    require(st->lambda > 0.0, "posterior_variances: static lambda must be positive");
    for (std::size_t i = 0; i < d; ++i) out[i] = 1.0 / st->lambda;
  } else {
    const auto& mem = std::get<MemoryMode>(mode);
    require(mem.lambda > 0.0, "posterior_variances: memory lambda must be positive");
    require_shape(mem.fisher_hist.size() == d,
                  "posterior_variances: historical Fisher dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      if (!(mem.fisher_hist[i] > 0.0))
        throw DomainError("posterior_variances: historical Fisher must be positive");
      out[i] = 1.0 / (mem.lambda * mem.fisher_hist[i]);
    }
  }
  return out;
}

struct KlComparisonOptions {
  // GAS candidate. When gas_fisher_estimate is set it stands in for the
  // gradient-derived Fisher (the true Fisher still defines the posterior pi);
  // gas_optimal_c replaces gas_c with c = d / sum(F_ii / Fhat_ii), the value
  // that minimizes the variance-only KL of the GAS candidate.
  double gas_c = 1.0;
  bool gas_optimal_c = false;
  std::optional<std::vector<double>> gas_fisher_estimate;

  double iso_c = 1.0;

  std::optional<double> static_lambda;

  std::optional<std::vector<double>> memory_fisher_hist;
  double memory_lambda = 1.0;
};

struct KlComparisonReport {
  double kl_gas = 0.0;
  double kl_iso = 0.0;
  std::optional<double> kl_static;
  std::optional<double> kl_memory;
  double fisher_variance = 0.0;
};

/// Variance-only KL of each requested candidate against pi = N(theta*, 1/F).
/// All candidates share the mean theta*, so only variances enter.
inline KlComparisonReport kl_comparison(const FisherDiagonal& fisher_current,
                                        const KlComparisonOptions& options = {}) {
  const std::size_t d = fisher_current.dim();
  KlComparisonReport report;
  report.fisher_variance = fisher_current.variance();

  const std::vector<double>& estimate =
      options.gas_fisher_estimate ? *options.gas_fisher_estimate : fisher_current.values;
  require_shape(estimate.size() == d, "kl_comparison: gas Fisher estimate dimension mismatch");
  for (double f : estimate) {
    if (!(f > 0.0)) throw DomainError("kl_comparison: gas Fisher estimate must be positive");
  }

  double c = options.gas_c;
  if (options.gas_optimal_c) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += fisher_current.values[i] / estimate[i];
    c = static_cast<double>(d) / s;
  }
  require(c > 0.0, "kl_comparison: gas scale must be positive");

  std::vector<double> gas_var(d);
  for (std::size_t i = 0; i < d; ++i) gas_var[i] = c / estimate[i];
  report.kl_gas = kl_variance_only(gas_var, fisher_current);

  report.kl_iso = kl_variance_only(
      posterior_variances(fisher_current, IsotropicMode{options.iso_c}), fisher_current);

  if (options.static_lambda) {
    report.kl_static = kl_variance_only(
        posterior_variances(fisher_current, StaticMode{*options.static_lambda}),
        fisher_current);
  }
  if (options.memory_fisher_hist) {
    report.kl_memory = kl_variance_only(
        posterior_variances(fisher_current,
                            MemoryMode{options.memory_lambda, *options.memory_fisher_hist}),
        fisher_current);
  }
  return report;
}

/// McAllester gap term: sqrt((KL + ln(2 sqrt(n) / delta)) / (2n)).
/// The confidence level is named confidence_delta to keep it apart from the
/// gradient-Fisher approximation error, which this module calls approx_error.
inline double pac_bayes_gap(double kl, std::size_t n, double confidence_delta) {
  require(kl >= 0.0 && std::isfinite(kl), "pac_bayes_gap: kl must be finite and nonnegative");
  require(n >= 1, "pac_bayes_gap: n must be >= 1");
  require(confidence_delta > 0.0 && confidence_delta < 1.0,
          "pac_bayes_gap: delta must lie in (0, 1)");
  double nn = static_cast<double>(n);
  return std::sqrt((kl + std::log(2.0 * std::sqrt(nn) / confidence_delta)) / (2.0 * nn));
}

}  // namespace jascl::numerics
