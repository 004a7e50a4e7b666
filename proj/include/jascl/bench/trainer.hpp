#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "jascl/bench/dataset.hpp"
#include "jascl/bench/model.hpp"
#include "jascl/common.hpp"
#include "jascl/gas.hpp"
#include "jascl/pas.hpp"
#include "jascl/rng.hpp"

namespace jascl::bench {

/// Per-session training configuration. Mechanisms are independent toggles so
/// the ablation matrix (vanilla / gas-only / pas-only / full) is expressible;
/// all of them off reduces the loop to plain cross-entropy fine-tuning.
struct TrainConfig {
  double lr = 0.5;
  std::size_t epochs = 30;
  std::size_t batch_size = 8;
  double lambda_cons = 1.0;
  double lambda_proto = 0.1;
  bool gas = false;
  bool pas = false;
  bool replay = false;
  bool use_unlabeled = true;
  double ema_alpha = 0.95;
  double gas_epsilon = 1e-8;
  // Mean-teacher input perturbation: the student sees a noised copy of each
  // unlabeled image while the teacher sees it clean, so the consistency term
  // trains invariance rather than comparing identical forward passes.
  double student_input_noise = 0.05;
  pas::FilterConfig filter;
};

struct EpochLog {
  std::size_t epoch = 0;
  double total_loss = 0.0;
  double ce_loss = 0.0;
  double cons_loss = 0.0;
  double proto_loss = 0.0;
  double accepted_pct = 0.0;  // jointly validated pixels / unlabeled pixels seen
  double measured_f = 0.0;
  double measured_rho = 1.0;
  bool rho_vacuous = true;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::vector<double> step_losses;
};

struct TrainResult {
  PixelClassifierModel model;
  TrainLog log;
  pas::PrototypeBank session_prototypes;
};

namespace detail {

inline std::vector<std::size_t> shuffled_indices(std::size_t n, RngStream& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.uniform_index(i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace detail

/// One session of mini-batch gradient descent on the combined objective
///   CE(labeled) + lambda_cons * consistency(validated unlabeled)
///              + lambda_proto * replay(prior prototypes),
/// with transient GAS perturbation of the classifier weights each step and a
/// mean-teacher over the classifier for pseudo-label validation.
///
/// The featurizer is fixed, so the session's prototypes are identical whether
/// computed before or after the weight updates; they are computed once from
/// the labeled split and returned for the caller to append to its bank.
inline TrainResult train_session(const PixelClassifierModel& model, const SessionData& data,
                                 const pas::PrototypeBank& prior_bank, const TrainConfig& cfg,
                                 const RngRoot& session_root) {
  require(!data.labeled.empty(), "train_session: no labeled data");
  require(cfg.batch_size >= 1, "train_session: batch_size must be >= 1");
  require(cfg.lr > 0.0, "train_session: lr must be positive");
  require(cfg.ema_alpha >= 0.0 && cfg.ema_alpha < 1.0, "train_session: ema_alpha outside [0,1)");

  const std::size_t C = model.num_classes();
  const std::size_t D = model.feature_dim();

  // Featurizer is frozen: extract features once.
  std::vector<Tensor3> feats_labeled;
  feats_labeled.reserve(data.labeled.size());
  for (const auto& img : data.labeled) {
    feats_labeled.push_back(model.featurizer.features(img.pixels));
  }
  const bool semi = cfg.pas && cfg.use_unlabeled && !data.unlabeled.empty();
  std::vector<Tensor3> feats_unlabeled;
  if (semi) {
    feats_unlabeled.reserve(data.unlabeled.size());
    for (const auto& img : data.unlabeled) {
      feats_unlabeled.push_back(model.featurizer.features(img.pixels));
    }
  }

  // Session prototypes from labeled data; stable across the session.
  std::vector<pas::LabeledFeatures> labeled_features;
  labeled_features.reserve(data.labeled.size());
  for (std::size_t i = 0; i < data.labeled.size(); ++i) {
    labeled_features.push_back({pas::FeatureMap(feats_labeled[i]), data.labeled[i].labels});
  }
  pas::PrototypeBank session_protos = pas::compute_prototypes(labeled_features);

  pas::PrototypeBank validation_bank = prior_bank;
  validation_bank.merge(session_protos);

  TrainResult result{model, {}, std::move(session_protos)};
  Matrix& W = result.model.weights;
  std::vector<double>& b = result.model.bias;

  Matrix teacher_w = W;
  std::vector<double> teacher_b = b;

  gas::GradientBuffer buffer(C, D, cfg.gas_epsilon);
  RngStream gas_rng = session_root.stream("gas/noise");
  RngStream aug_rng = session_root.stream("consistency/augment");

  const std::size_t n_labeled = data.labeled.size();
  const bool replay_active = cfg.replay && !prior_bank.empty();

  std::size_t global_step = 0;
  std::vector<double> probs(C);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    RngStream shuffle_rng =
        session_root.stream("shuffle/epoch" + std::to_string(epoch));
    auto order = detail::shuffled_indices(n_labeled, shuffle_rng);

    std::vector<std::size_t> uorder;
    std::size_t ucursor = 0;
    if (semi) {
      RngStream urng = session_root.stream("unlabeled/epoch" + std::to_string(epoch));
      uorder = detail::shuffled_indices(data.unlabeled.size(), urng);
    }

    EpochLog elog;
    elog.epoch = epoch;
    double epoch_ce = 0.0, epoch_cons = 0.0, epoch_proto = 0.0;
    std::size_t epoch_batches = 0;
    std::size_t u_pixels = 0, u_accepted = 0, u_correct = 0;

    for (std::size_t start = 0; start < n_labeled; start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, n_labeled);

      // Transient perturbation: forward/backward through W_eff, update W.
      Matrix W_eff = W;
      if (cfg.gas) {
        auto scales = gas::noise_scales(buffer);
        W_eff = gas::perturb(W, scales, gas_rng);
      }

      Matrix grad_w(C, D, 0.0);
      std::vector<double> grad_b(C, 0.0);
      double ce = 0.0;
      std::size_t ce_pixels = 0;

      for (std::size_t k = start; k < end; ++k) {
        const Tensor3& F = feats_labeled[order[k]];
        const Grid<int>& Y = data.labeled[order[k]].labels;
        for (std::size_t y = 0; y < F.height; ++y) {
          for (std::size_t x = 0; x < F.width; ++x) {
            double mx = -1e300;
            for (std::size_t c = 0; c < C; ++c) {
              double z = b[c];
              for (std::size_t d = 0; d < D; ++d) z += W_eff(c, d) * F(d, y, x);
              probs[c] = z;
              mx = std::max(mx, z);
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < C; ++c) {
              probs[c] = std::exp(probs[c] - mx);
              sum += probs[c];
            }
            int target = Y(y, x);
            ce -= std::log(probs[static_cast<std::size_t>(target)] / sum);
            for (std::size_t c = 0; c < C; ++c) {
              double coef = probs[c] / sum - (static_cast<int>(c) == target ? 1.0 : 0.0);
              grad_b[c] += coef;
              for (std::size_t d = 0; d < D; ++d) grad_w(c, d) += coef * F(d, y, x);
            }
            ++ce_pixels;
          }
        }
      }
      double inv_px = 1.0 / static_cast<double>(ce_pixels);
      ce *= inv_px;
      for (auto& v : grad_w.data) v *= inv_px;
      for (auto& v : grad_b) v *= inv_px;

      double cons = 0.0;
      if (semi) {
        // Each side is validated with its own view (student: noised input and
        // perturbed weights; teacher: clean both); the loss runs over the
        // intersection pooled across the unlabeled batch.
        struct UnlabeledEval {
          std::size_t index;
          Tensor3 feats_s;  // student-view features (gradient path)
          Tensor3 probs_s;
          Tensor3 probs_t;
          Grid<std::uint8_t> joint;
        };
        std::vector<UnlabeledEval> evals;
        std::size_t joint_total = 0;
        const std::size_t ubatch = std::min<std::size_t>(cfg.batch_size, uorder.size());
        for (std::size_t uk = 0; uk < ubatch; ++uk) {
          std::size_t ui = uorder[ucursor];
          ucursor = (ucursor + 1) % uorder.size();
          const Tensor3& F_clean = feats_unlabeled[ui];

          // Student view: fresh pixel noise, refeaturized; teacher view: clean.
          Tensor3 F = F_clean;
          if (cfg.student_input_noise > 0.0) {
            const Grid<std::uint8_t>& raw = data.unlabeled[ui].pixels;
            Grid<std::uint8_t> noised(raw.height, raw.width, 0);
            for (std::size_t i = 0; i < raw.size(); ++i) {
              double v = static_cast<double>(raw.data[i]) / 255.0 +
                         cfg.student_input_noise * aug_rng.normal();
              noised.data[i] =
                  static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
            }
            F = result.model.featurizer.features(noised);
          }

          Tensor3 logits_s = PixelClassifierModel::logits_for(F, W_eff, b);
          Tensor3 logits_t = PixelClassifierModel::logits_for(F_clean, teacher_w, teacher_b);

          auto mask_s = pas::validate_pixels(logits_s, pas::FeatureMap(F), validation_bank,
                                             cfg.filter);
          auto mask_t = pas::validate_pixels(logits_t, pas::FeatureMap(F_clean),
                                             validation_bank, cfg.filter);

          UnlabeledEval ev;
          ev.index = ui;
          ev.probs_s = Tensor3(C, logits_s.height, logits_s.width);
          ev.probs_t = Tensor3(C, logits_s.height, logits_s.width);
          ev.joint = Grid<std::uint8_t>(logits_s.height, logits_s.width, 0);
          for (std::size_t y = 0; y < logits_s.height; ++y) {
            for (std::size_t x = 0; x < logits_s.width; ++x) {
              pas::detail::softmax_pixel(logits_s, y, x, probs);
              for (std::size_t c = 0; c < C; ++c) ev.probs_s(c, y, x) = probs[c];
              pas::detail::softmax_pixel(logits_t, y, x, probs);
              for (std::size_t c = 0; c < C; ++c) ev.probs_t(c, y, x) = probs[c];
              bool joint = mask_s.mask(y, x) && mask_t.mask(y, x);
              ev.joint(y, x) = joint ? 1 : 0;
              ++u_pixels;
              if (joint) {
                ++joint_total;
                std::size_t tc = 0;
                for (std::size_t c = 1; c < C; ++c) {
                  if (ev.probs_t(c, y, x) > ev.probs_t(tc, y, x)) tc = c;
                }
                ++u_accepted;
                if (static_cast<int>(tc) == data.unlabeled[ui].labels(y, x)) ++u_correct;
              }
            }
          }
          ev.feats_s = std::move(F);
          evals.push_back(std::move(ev));
        }

        if (joint_total > 0) {
          double inv_joint = 1.0 / static_cast<double>(joint_total);
          for (const auto& ev : evals) {
            const Tensor3& F = ev.feats_s;
            for (std::size_t y = 0; y < F.height; ++y) {
              for (std::size_t x = 0; x < F.width; ++x) {
                if (!ev.joint(y, x)) continue;
                double dot = 0.0;
                for (std::size_t c = 0; c < C; ++c) {
                  double diff = ev.probs_s(c, y, x) - ev.probs_t(c, y, x);
                  cons += diff * diff;
                  dot += diff * ev.probs_s(c, y, x);
                }
                for (std::size_t c = 0; c < C; ++c) {
                  double p = ev.probs_s(c, y, x);
                  double diff = p - ev.probs_t(c, y, x);
                  double gz = 2.0 * p * (diff - dot) * inv_joint * cfg.lambda_cons;
                  grad_b[c] += gz;
                  for (std::size_t d = 0; d < D; ++d) grad_w(c, d) += gz * F(d, y, x);
                }
              }
            }
          }
          cons *= inv_joint;
        }
      }

      double proto = 0.0;
      if (replay_active) {
        // Replay runs the anchor through the full classifier F (weights and
        // bias): anchoring the bias is what stops the background logit from
        // absorbing old classes across sessions.
        double inv_n = 1.0 / static_cast<double>(prior_bank.classes.size());
        for (const auto& [cid, entry] : prior_bank.classes) {
          if (cid < 0 || static_cast<std::size_t>(cid) >= C) {
            throw DomainError("train_session: prototype class outside classifier range");
          }
          double mx = -1e300;
          for (std::size_t c = 0; c < C; ++c) {
            double z = b[c];
            for (std::size_t d = 0; d < D; ++d) z += W_eff(c, d) * entry.prototype[d];
            probs[c] = z;
            mx = std::max(mx, z);
          }
          double sum = 0.0;
          for (std::size_t c = 0; c < C; ++c) {
            probs[c] = std::exp(probs[c] - mx);
            sum += probs[c];
          }
          proto -= std::log(probs[static_cast<std::size_t>(cid)] / sum);
          for (std::size_t c = 0; c < C; ++c) {
            double coef = (probs[c] / sum - (static_cast<int>(c) == cid ? 1.0 : 0.0)) * inv_n *
                          cfg.lambda_proto;
            grad_b[c] += coef;
            for (std::size_t d = 0; d < D; ++d) grad_w(c, d) += coef * entry.prototype[d];
          }
        }
        proto *= inv_n;
      }

      double total = ce + cfg.lambda_cons * cons + cfg.lambda_proto * proto;
      if (!std::isfinite(total)) {
        throw TrainingDivergenceError("train_session: non-finite loss", global_step);
      }
      result.log.step_losses.push_back(total);
      epoch_ce += ce;
      epoch_cons += cons;
      epoch_proto += proto;
      ++epoch_batches;

      for (std::size_t i = 0; i < W.size(); ++i) W.data[i] -= cfg.lr * grad_w.data[i];
      for (std::size_t c = 0; c < C; ++c) b[c] -= cfg.lr * grad_b[c];

      if (cfg.gas) buffer.accumulate(grad_w);
      if (cfg.pas) {
        teacher_w.data = pas::ema_update(teacher_w.data, W.data, cfg.ema_alpha);
        teacher_b = pas::ema_update(teacher_b, b, cfg.ema_alpha);
      }
      ++global_step;
    }

    double inv_batches = epoch_batches > 0 ? 1.0 / static_cast<double>(epoch_batches) : 0.0;
    elog.ce_loss = epoch_ce * inv_batches;
    elog.cons_loss = epoch_cons * inv_batches;
    elog.proto_loss = epoch_proto * inv_batches;
    elog.total_loss = elog.ce_loss + cfg.lambda_cons * elog.cons_loss +
                      cfg.lambda_proto * elog.proto_loss;
    if (u_pixels > 0) {
      elog.measured_f = static_cast<double>(u_accepted) / static_cast<double>(u_pixels);
      elog.accepted_pct = 100.0 * elog.measured_f;
      if (u_accepted > 0) {
        elog.measured_rho = static_cast<double>(u_correct) / static_cast<double>(u_accepted);
        elog.rho_vacuous = false;
      }
    }
    result.log.epochs.push_back(elog);
  }

  return result;
}

/// Training-log CSV per the retention-analysis format:
/// epoch, accepted_pct, measured_f, measured_rho (blank when no truth/vacuous).
inline std::string training_log_csv(const TrainLog& log) {
  std::string out = "epoch,accepted_pct,measured_f,measured_rho\n";
  char buf[160];
  for (const auto& e : log.epochs) {
    if (e.rho_vacuous) {
      std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,\n", e.epoch, e.accepted_pct,
                    e.measured_f);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f\n", e.epoch, e.accepted_pct,
                    e.measured_f, e.measured_rho);
    }
    out += buf;
  }
  return out;
}

}  // namespace jascl::bench
