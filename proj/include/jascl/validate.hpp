#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jascl/common.hpp"
#include "jascl/dynamics.hpp"
#include "jascl/gas.hpp"
#include "jascl/numerics.hpp"
#include "jascl/rng.hpp"

namespace jascl::validate {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline void record(std::vector<CheckResult>& out, const std::string& name, bool pass,
                   const std::string& detail = "") {
  out.push_back({name, pass, detail});
}

}  // namespace detail

/// Randomized invariant sweeps over the numerics / gas / dynamics modules.
/// Deterministic for a fixed seed; every check is independent of the others.
inline std::vector<CheckResult> run_theory_checks(std::uint64_t seed) {
  using namespace jascl::numerics;
  using namespace jascl::gas;
  using namespace jascl::dynamics;
  std::vector<CheckResult> out;
  RngRoot root(seed);

  {
    RngStream rng = root.stream("f_ratio");
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 1000 && ok; ++i) {
      double x = rng.uniform(0.5, 1.5);
      double fx = f_ratio(x);
      double q = (x - 1.0) * (x - 1.0);
      ok = fx >= 0.0 && fx >= (2.0 / 9.0) * q - 1e-15 && fx <= 2.0 * q + 1e-15;
      if (x <= 1.0) ok = ok && fx >= 0.5 * q - 1e-15 && fx <= q + 1e-15;
      if (!ok) detail = "violated at x=" + std::to_string(x);
    }
    detail::record(out, "numerics/f_ratio_envelope", ok, detail);
  }

  {
    RngStream rng = root.stream("kl_self");
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
      std::size_t d = 1 + rng.uniform_index(5);
      std::vector<double> mu(d), var(d);
      for (std::size_t k = 0; k < d; ++k) {
        mu[k] = rng.uniform(-2.0, 2.0);
        var[k] = rng.uniform(0.2, 4.0);
      }
      DiagonalGaussian g(mu, var);
      ok = std::abs(kl_diag(g, g)) < 1e-12;
    }
    detail::record(out, "numerics/kl_self_zero", ok);
  }

  {
    RngStream rng = root.stream("jensen");
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      std::size_t d = 2 + rng.uniform_index(9);
      std::vector<double> f(d);
      for (auto& v : f) v = rng.uniform(0.1, 10.0);
      FisherDiagonal fisher(f);
      auto rep = kl_comparison(fisher);
      if (rep.fisher_variance > 0.0) ok = rep.kl_gas < rep.kl_iso;
    }
    for (int i = 0; i < 100 && ok; ++i) {
      FisherDiagonal fisher(std::vector<double>(4, rng.uniform(0.1, 10.0)));
      auto rep = kl_comparison(fisher);
      ok = std::abs(rep.kl_gas - rep.kl_iso) < 1e-12;
    }
    detail::record(out, "numerics/jensen_strictness", ok);
  }

  {
    RngStream rng = root.stream("pac_order");
    bool ok = true;
    for (int i = 0; i < 500 && ok; ++i) {
      std::size_t d = 2 + rng.uniform_index(6);
      std::vector<double> f(d);
      for (auto& v : f) v = rng.uniform(0.2, 8.0);
      auto rep = kl_comparison(FisherDiagonal(f));
      std::size_t n = 50 + rng.uniform_index(2000);
      if (rep.kl_gas < rep.kl_iso) {
        ok = pac_bayes_gap(rep.kl_gas, n, 0.05) < pac_bayes_gap(rep.kl_iso, n, 0.05);
      }
    }
    detail::record(out, "numerics/pac_bayes_order", ok);
  }

  {
    RngStream rng = root.stream("scales");
    bool ok = true;
    for (int rep = 0; rep < 200 && ok; ++rep) {
      GradientBuffer buf(1 + rng.uniform_index(4), 1 + rng.uniform_index(6));
      Matrix g(buf.sums.rows, buf.sums.cols);
      for (auto& v : g.data) v = rng.uniform(-3.0, 3.0);
      buf.accumulate(g);
      auto scales = noise_scales(buf);
      std::size_t argmin = 0;
      bool saw_one = false;
      for (std::size_t i = 0; i < buf.sums.size(); ++i) {
        if (buf.sums.data[i] < buf.sums.data[argmin]) argmin = i;
        double s = scales.scales.data[i];
        if (!(s > 0.0 && s <= 1.0)) ok = false;
        if (s == 1.0) saw_one = true;
      }
      ok = ok && saw_one && scales.scales.data[argmin] == 1.0;
    }
    detail::record(out, "gas/noise_scale_range", ok);
  }

  {
    GradientBuffer buf(2, 2);
    Matrix g(2, 2);
    g.data = {1.0, -0.5, 0.25, 2.0};
    buf.accumulate(g);
    auto scales = noise_scales(buf);
    Matrix w(2, 2, 0.0);
    bool ok = perturb(w, scales, 7u).data == perturb(w, scales, 7u).data;
    detail::record(out, "gas/perturb_reproducible", ok);
  }

  {
    RngStream rng = root.stream("adversarial");
    bool ok = true;
    for (int rep = 0; rep < 100 && ok; ++rep) {
      std::size_t d = 1 + rng.uniform_index(10);
      std::vector<double> eig(d);
      for (auto& l : eig) l = rng.uniform(0.05, 5.0);
      QuadraticLandscape land(eig);
      auto cmp = adversarial_comparison(land, rng.uniform(0.1, 3.0));
      ok = cmp.ratio >= 1.0 - 1e-12 && cmp.ratio <= land.condition_number() + 1e-12;
    }
    detail::record(out, "gas/adversarial_ratio_bounds", ok);
  }

  {
    // Orderings of Thm-style shift scenarios: stale static / memory candidates
    // against a GAS candidate built from a lightly corrupted Fisher estimate.
    RngStream rng = root.stream("shift");
    bool ok = true;
    const double approx_error = 0.05;
    for (int rep = 0; rep < 500 && ok; ++rep) {
      std::size_t d = 4 + rng.uniform_index(12);
      std::vector<double> prev(d), cur(d), est(d);
      for (std::size_t i = 0; i < d; ++i) {
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
      opts.static_lambda = static_cast<double>(d) / prev_mean;  // calibrated at t-1
      opts.memory_fisher_hist = prev;                           // stale history
      auto rep_kl = kl_comparison(fisher, opts);
      ok = rep_kl.kl_gas < *rep_kl.kl_static && rep_kl.kl_gas < *rep_kl.kl_memory;
    }
    detail::record(out, "gas/shift_orderings", ok);
  }

  {
    RngStream rng = root.stream("contraction");
    bool ok = true;
    for (int rep = 0; rep < 500 && ok; ++rep) {
      DynamicsParams p(rng.uniform(0.05, 0.9), rng.uniform(0.05, 0.95), rng.uniform(0.0, 0.99),
                       rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
      ok = p.lambda() < 1.0 && p.lambda_eff() <= p.lambda() + 1e-15;
      if (ok) {
        double closed = asymptotic_error(p, FilterMode::filtered);
        auto conv = iterate_to_fixed_point(p, FilterMode::filtered, 1e-13, 2000000);
        ok = std::abs(conv.value - closed) < 1e-9;
      }
    }
    detail::record(out, "dynamics/contraction_convergence", ok);
  }

  {
    RngStream rng = root.stream("rho_monotone");
    bool ok = true;
    for (int rep = 0; rep < 1000 && ok; ++rep) {
      double eps0 = rng.uniform(0.05, 0.9);
      double gamma = rng.uniform(0.05, 0.95);
      double alpha = rng.uniform(0.0, 0.99);
      double f = rng.uniform(0.05, 1.0);
      double rho = rng.uniform(0.01, 0.98);
      DynamicsParams a(eps0, gamma, alpha, f, rho);
      DynamicsParams b(eps0, gamma, alpha, f, rho + 1e-6);
      ok = asymptotic_error(b, FilterMode::filtered) < asymptotic_error(a, FilterMode::filtered);
    }
    detail::record(out, "dynamics/asymptotic_decreasing_in_rho", ok);
  }

  {
    RngStream rng = root.stream("threshold");
    bool ok = true;
    for (int rep = 0; rep < 1000 && ok; ++rep) {
      double eps0 = rng.uniform(0.05, 0.9);
      double gamma = rng.uniform(0.05, 0.95);
      double f = rng.uniform(0.05, 1.0);
      double rho = rng.uniform(0.0, 1.0);
      DynamicsParams p(eps0, gamma, rng.uniform(0.0, 0.99), f, rho);
      double threshold = improvement_threshold(f, gamma);
      double einf = asymptotic_error(p, FilterMode::filtered);
      if (rho > threshold && rho > 0.0) ok = einf < eps0;
      if (ok && rho == 0.0) ok = einf == eps0;
      if (ok && f * gamma <= 0.5) ok = threshold <= 1e-15;
    }
    detail::record(out, "dynamics/improvement_threshold_sufficiency", ok);
  }

  {
    RngStream rng = root.stream("dual_sign");
    bool ok = true;
    for (int rep = 0; rep < 10000 && ok; ++rep) {
      CriteriaStats s(rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0),
                      rng.uniform(0.01, 1.0), rng.uniform(0.01, 0.99));
      auto d = dual_precision(s);
      double diff = d.rho12 - d.rho1;
      double crit = s.alpha2 - s.beta2;
      ok = (crit > 0.0 && diff > 0.0) || (crit < 0.0 && diff < 0.0) ||
           (crit == 0.0 && std::abs(diff) < 1e-15);
      if (ok) ok = std::abs(d.gain - precision_gain_formula(s)) < 1e-12;
    }
    detail::record(out, "dynamics/dual_criteria_sign_law", ok);
  }

  {
    RngStream rng = root.stream("memory_bank");
    bool ok = true;
    for (int rep = 0; rep < 100 && ok; ++rep) {
      const int knots = 5;
      std::vector<double> xs(knots), ys(knots);
      for (int k = 0; k < knots; ++k) xs[k] = static_cast<double>(k) / (knots - 1);
      for (int k = 0; k < knots; ++k) {
        ys[k] = xs[k] + rng.uniform(k == 0 ? 0.01 : 0.0, 1.0 - xs[k]);
      }
      auto g = [xs, ys](double e) {
        if (e <= xs.front()) return ys.front();
        for (std::size_t k = 1; k < xs.size(); ++k) {
          if (e <= xs[k]) {
            double t = (e - xs[k - 1]) / (xs[k] - xs[k - 1]);
            return ys[k - 1] + t * (ys[k] - ys[k - 1]);
          }
        }
        return ys.back();
      };
      MemoryBankModel m(rng.uniform(0.05, 1.0), g, rng.uniform(0.0, 0.5));
      auto traj = memory_bank_trajectory(m, 50);
      for (std::size_t t = 1; t < traj.size() && ok; ++t) ok = traj[t] >= traj[t - 1] - 1e-15;
    }
    detail::record(out, "dynamics/memory_bank_nondecreasing", ok);
  }

  return out;
}

inline bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

}  // namespace jascl::validate
