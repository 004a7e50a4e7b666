#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "jascl/common.hpp"
#include "jascl/rng.hpp"

namespace jascl::dynamics {

/// Parameters of the pseudo-label error-dynamics model. rho_precision is the
/// probability that an accepted pseudo-label is correct (distinct from the
/// perturbation radius rho_radius used by the gas module).
struct DynamicsParams {
  double epsilon0;       // irreducible labeled-data error, in (0,1)
  double gamma;          // pseudo-label weight, in (0,1)
  double alpha;          // EMA decay, in [0,1)
  double f;              // coverage, in [0,1]
  double rho_precision;  // precision, in [0,1]

  DynamicsParams(double eps0, double g, double a, double cov, double prec)
      : epsilon0(eps0), gamma(g), alpha(a), f(cov), rho_precision(prec) {
    require(epsilon0 > 0.0 && epsilon0 < 1.0, "DynamicsParams: epsilon0 outside (0,1)");
    require(gamma > 0.0 && gamma < 1.0, "DynamicsParams: gamma outside (0,1)");
    require(alpha >= 0.0 && alpha < 1.0, "DynamicsParams: alpha outside [0,1)");
    require(f >= 0.0 && f <= 1.0, "DynamicsParams: coverage outside [0,1]");
    require(rho_precision >= 0.0 && rho_precision <= 1.0,
            "DynamicsParams: precision outside [0,1]");
  }

  /// Contraction factor without filtering: alpha + (1-alpha) gamma < 1.
  double lambda() const { return alpha + (1.0 - alpha) * gamma; }

  /// Contraction factor with filtering: alpha + (1-alpha) f gamma (1-rho).
  double lambda_eff() const {
    return alpha + (1.0 - alpha) * f * gamma * (1.0 - rho_precision);
  }
};

enum class FilterMode { unfiltered, filtered };

/// One teacher-error recurrence step.
inline double step(double eps_t, const DynamicsParams& p, FilterMode mode) {
  require(eps_t >= 0.0 && eps_t <= 1.0, "step: eps_t outside [0,1]");
  if (mode == FilterMode::unfiltered) {
    return p.lambda() * eps_t + (1.0 - p.alpha) * (1.0 - p.gamma) * p.epsilon0;
  }
  double fg = p.f * p.gamma;
  return p.lambda_eff() * eps_t + (1.0 - p.alpha) * (1.0 - fg) * p.epsilon0;
}

/// Fixed point of the recurrence. Unfiltered pseudo-labeling converges back to
/// the supervised error; filtering reshapes the limit. The rho endpoints are
/// evaluated in closed form so they are exact, not merely within rounding.
inline double asymptotic_error(const DynamicsParams& p, FilterMode mode) {
  if (mode == FilterMode::unfiltered) return p.epsilon0;
  if (p.rho_precision == 0.0) return p.epsilon0;
  double fg = p.f * p.gamma;
  if (p.rho_precision == 1.0) return (1.0 - fg) * p.epsilon0;
  return (1.0 - fg) * p.epsilon0 / (1.0 - fg * (1.0 - p.rho_precision));
}

/// Precision threshold above which filtering beats supervised-only training:
/// (2 f gamma - 1) / (f gamma). Non-positive whenever f gamma <= 1/2.
inline double improvement_threshold(double f, double gamma) {
  require(f > 0.0 && f <= 1.0, "improvement_threshold: f outside (0,1]");
  require(gamma > 0.0 && gamma < 1.0, "improvement_threshold: gamma outside (0,1)");
  double fg = f * gamma;
  return (2.0 * fg - 1.0) / fg;
}

struct ConvergenceResult {
  double value = 0.0;
  std::size_t steps = 0;
};

/// Iterate step() from epsilon0 until |e_{t+1} - e_t| < tol (or the iteration
/// cap, whichever first).
inline ConvergenceResult iterate_to_fixed_point(const DynamicsParams& p, FilterMode mode,
                                                double tol = 1e-12,
                                                std::size_t max_steps = 1000000) {
  double e = p.epsilon0;
  for (std::size_t k = 1; k <= max_steps; ++k) {
    double next = step(e, p, mode);
    if (std::abs(next - e) < tol) return {next, k};
    e = next;
  }
  return {e, max_steps};
}

/// True/false-positive rates of the two acceptance criteria plus the base
/// precision pi of unfiltered pseudo-labels (named base_rate to keep it apart
/// from the true posterior of the numerics module).
struct CriteriaStats {
  double alpha1, alpha2;  // P(criterion passes | correct)
  double beta1, beta2;    // P(criterion passes | incorrect)
  double base_rate;       // pi = P(correct), in (0,1)

  CriteriaStats(double a1, double a2, double b1, double b2, double pi)
      : alpha1(a1), alpha2(a2), beta1(b1), beta2(b2), base_rate(pi) {
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    require(in_unit(alpha1) && in_unit(alpha2) && in_unit(beta1) && in_unit(beta2),
            "CriteriaStats: rates must lie in (0,1]");
    require(base_rate > 0.0 && base_rate < 1.0, "CriteriaStats: base rate outside (0,1)");
  }

  double lr1() const { return alpha1 / beta1; }
  double lr2() const { return alpha2 / beta2; }
};

struct DualPrecision {
  double rho1 = 0.0;   // precision of the confidence criterion alone
  double rho12 = 0.0;  // precision of the dual criteria
  double gain = 0.0;   // rho12 / rho1
};

/// Bayes precision of single- vs dual-criteria filtering. rho12 > rho1 exactly
/// when the second criterion is discriminative (alpha2 > beta2).
inline DualPrecision dual_precision(const CriteriaStats& s) {
  DualPrecision out;
  double pi = s.base_rate;
  out.rho1 = s.alpha1 * pi / (s.alpha1 * pi + s.beta1 * (1.0 - pi));
  out.rho12 = s.alpha1 * s.alpha2 * pi /
              (s.alpha1 * s.alpha2 * pi + s.beta1 * s.beta2 * (1.0 - pi));
  out.gain = out.rho12 / out.rho1;
  return out;
}

/// Closed-form gain (1 + r/LR1) / (1 + r/(LR1 LR2)) with r = (1-pi)/pi; an
/// algebraically independent route to DualPrecision::gain.
inline double precision_gain_formula(const CriteriaStats& s) {
  double r = (1.0 - s.base_rate) / s.base_rate;
  return (1.0 + r / s.lr1()) / (1.0 + r / (s.lr1() * s.lr2()));
}

struct MemoryBankOptions {
  std::size_t audit_points = 1024;
  bool require_positive_g0 = true;  // relax only for identity-boundary tests
};

/// Memory-bank error model: a fraction eta of the bank refreshes each round
/// with samples whose error rate is g(e_t). The self-reinforcement assumption
/// g(e) >= e is audited on a uniform grid at construction.
struct MemoryBankModel {
  double eta;
  std::function<double(double)> g;
  double e0;

  using Options = MemoryBankOptions;

  MemoryBankModel(double update_fraction, std::function<double(double)> response,
                  double initial_error, const Options& opts = Options())
      : eta(update_fraction), g(std::move(response)), e0(initial_error) {
    require(eta > 0.0 && eta <= 1.0, "MemoryBankModel: eta outside (0,1]");
    require(e0 >= 0.0 && e0 <= 1.0, "MemoryBankModel: e0 outside [0,1]");
    if (opts.audit_points < 2) {
      throw ModelConstructionError("MemoryBankModel: audit grid needs >= 2 points");
    }
    for (std::size_t i = 0; i < opts.audit_points; ++i) {
      double e = static_cast<double>(i) / static_cast<double>(opts.audit_points - 1);
      double ge = g(e);
      if (!(ge >= 0.0 && ge <= 1.0)) {
        throw ModelConstructionError("MemoryBankModel: g(e) outside [0,1] on audit grid");
      }
      if (ge < e) {
        throw ModelConstructionError("MemoryBankModel: g(e) < e on audit grid");
      }
    }
    if (opts.require_positive_g0 && !(g(0.0) > 0.0)) {
      throw ModelConstructionError("MemoryBankModel: g(0) must be positive");
    }
  }
};

/// e_0 .. e_steps under e_{t+1} = (1-eta) e_t + eta g(e_t); non-decreasing
/// whenever g(e) >= e.
inline std::vector<double> memory_bank_trajectory(const MemoryBankModel& model,
                                                  std::size_t steps) {
  require(steps >= 1, "memory_bank_trajectory: steps must be >= 1");
  std::vector<double> out;
  out.reserve(steps + 1);
  double e = model.e0;
  out.push_back(e);
  for (std::size_t t = 0; t < steps; ++t) {
    e = (1.0 - model.eta) * e + model.eta * model.g(e);
    out.push_back(e);
  }
  return out;
}

struct McTrajectory {
  std::vector<double> analytic;   // deterministic recurrence, index 0 = epsilon0
  std::vector<double> mc_mean;    // mean teacher error across replicates
  std::vector<double> mc_stderr;  // standard error of that mean
};

/// Stochastic validation of the recurrence: each round every item is
/// independently supervised (incorrect w.p. epsilon0) or pseudo-labeled
/// (incorrect w.p. (1-rho) e_t), the realized student error is the empirical
/// fraction, and the teacher inherits it through the EMA. Per-item draws are
/// aggregated with exact binomial sampling.
inline McTrajectory monte_carlo_oracle(const DynamicsParams& p, std::size_t population,
                                       std::size_t steps, std::size_t replicates,
                                       std::uint64_t seed,
                                       FilterMode mode = FilterMode::filtered) {
  require(population >= 1000, "monte_carlo_oracle: population must be >= 1e3");
  require(steps >= 1, "monte_carlo_oracle: steps must be >= 1");
  require(replicates >= 2, "monte_carlo_oracle: needs >= 2 replicates");

  // Unfiltered dynamics are the filtered dynamics at full coverage with no
  // precision: every pseudo-label is used and errs at the teacher's rate.
  double f_eff = mode == FilterMode::filtered ? p.f : 1.0;
  double rho_eff = mode == FilterMode::filtered ? p.rho_precision : 0.0;

  McTrajectory out;
  out.analytic.resize(steps + 1);
  out.analytic[0] = p.epsilon0;
  for (std::size_t t = 1; t <= steps; ++t) {
    out.analytic[t] = step(out.analytic[t - 1], p, mode);
  }

  std::vector<std::vector<double>> runs(replicates);
  RngRoot root(seed);
  const double pop = static_cast<double>(population);
  for (std::size_t r = 0; r < replicates; ++r) {
    RngStream rng = root.stream("dynamics/mc/replicate/" + std::to_string(r));
    auto& traj = runs[r];
    traj.resize(steps + 1);
    double e_teacher = p.epsilon0;
    traj[0] = e_teacher;
    for (std::size_t t = 1; t <= steps; ++t) {
      std::uint64_t n_pseudo = rng.binomial(population, f_eff * p.gamma);
      std::uint64_t wrong_sup = rng.binomial(population - n_pseudo, p.epsilon0);
      std::uint64_t wrong_pseudo = rng.binomial(n_pseudo, (1.0 - rho_eff) * e_teacher);
      double eps_student = static_cast<double>(wrong_sup + wrong_pseudo) / pop;
      e_teacher = p.alpha * e_teacher + (1.0 - p.alpha) * eps_student;
      traj[t] = e_teacher;
    }
  }

  out.mc_mean.resize(steps + 1);
  out.mc_stderr.resize(steps + 1);
  const double R = static_cast<double>(replicates);
  for (std::size_t t = 0; t <= steps; ++t) {
    double mean = 0.0;
    for (const auto& traj : runs) mean += traj[t];
    mean /= R;
    double var = 0.0;
    for (const auto& traj : runs) var += (traj[t] - mean) * (traj[t] - mean);
    var /= (R - 1.0);
    out.mc_mean[t] = mean;
    out.mc_stderr[t] = std::sqrt(var / R);
  }
  return out;
}

}  // namespace jascl::dynamics
