#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "jascl/common.hpp"

namespace jascl::bench {

struct ProtocolValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Rendering domain of one session: the class palette is rotated by an angle,
/// intensities pass through a gamma curve, and pixels pick up additive noise.
struct DomainSpec {
  double palette_rotation_deg = 0.0;
  double noise_sigma = 0.05;
  double intensity_gamma = 1.0;

  bool operator==(const DomainSpec&) const = default;
};

struct SessionSpec {
  int session_index = 0;
  std::vector<int> class_ids;  // sorted, background 0 excluded
  DomainSpec domain;
  std::size_t labeled_count = 0;    // N_t
  std::size_t unlabeled_count = 0;  // M_t
  std::size_t shots = 0;            // K; N_t = K * |C_t| for t > 0
  std::size_t test_count = 20;
};

enum class TransitionCase { domain_shift, class_evolution, joint_shift };

inline const char* to_string(TransitionCase c) {
  switch (c) {
    case TransitionCase::domain_shift: return "domain-shift";
    case TransitionCase::class_evolution: return "class-evolution";
    default: return "joint-shift";
  }
}

/// Ordered session sequence plus per-transition case labels. Construction
/// validates the few-shot budget rule, the base-session budget dominance, the
/// no-revisit rule for (class, domain) pairs, and label consistency.
struct ContinualProtocol {
  std::vector<SessionSpec> sessions;
  std::vector<TransitionCase> transitions;

  explicit ContinualProtocol(std::vector<SessionSpec> specs) : sessions(std::move(specs)) {
    if (sessions.empty()) throw ProtocolValidationError("protocol: no sessions");
    for (std::size_t t = 0; t < sessions.size(); ++t) {
      auto& s = sessions[t];
      s.session_index = static_cast<int>(t);
      if (s.class_ids.empty()) throw ProtocolValidationError("protocol: empty class set");
      std::sort(s.class_ids.begin(), s.class_ids.end());
      for (int c : s.class_ids) {
        if (c <= 0) throw ProtocolValidationError("protocol: class ids must be positive");
      }
      if (std::adjacent_find(s.class_ids.begin(), s.class_ids.end()) != s.class_ids.end()) {
        throw ProtocolValidationError("protocol: duplicate class id in a session");
      }
      if (t > 0) {
        if (s.shots == 0) throw ProtocolValidationError("protocol: incremental shots K = 0");
        if (s.labeled_count != s.shots * s.class_ids.size()) {
          throw ProtocolValidationError("protocol: N_t must equal K * |C_t| for t > 0");
        }
        if (sessions[0].labeled_count < 10 * s.labeled_count) {
          throw ProtocolValidationError("protocol: base budget must satisfy N_0 >= 10 N_t");
        }
      } else if (s.labeled_count == 0) {
        throw ProtocolValidationError("protocol: base session needs labeled data");
      }
    }

    // Previously observed (class, domain) pairs are not revisited.
    for (std::size_t a = 0; a < sessions.size(); ++a) {
      for (std::size_t b = a + 1; b < sessions.size(); ++b) {
        if (sessions[a].domain == sessions[b].domain) {
          for (int c : sessions[b].class_ids) {
            if (std::binary_search(sessions[a].class_ids.begin(), sessions[a].class_ids.end(),
                                   c)) {
              throw ProtocolValidationError(
                  "protocol: class-domain pair recurs across sessions " + std::to_string(a) +
                  " and " + std::to_string(b));
            }
          }
        }
      }
    }

    transitions.reserve(sessions.size() - 1);
    for (std::size_t t = 1; t < sessions.size(); ++t) {
      bool same_classes = sessions[t].class_ids == sessions[t - 1].class_ids;
      bool same_domain = sessions[t].domain == sessions[t - 1].domain;
      if (same_classes && same_domain) {
        throw ProtocolValidationError("protocol: consecutive sessions are identical");
      }
      if (same_classes) {
        transitions.push_back(TransitionCase::domain_shift);
      } else if (same_domain) {
        transitions.push_back(TransitionCase::class_evolution);
      } else {
        transitions.push_back(TransitionCase::joint_shift);
      }
    }
  }

  int max_class_id() const {
    int m = 0;
    for (const auto& s : sessions) m = std::max(m, s.class_ids.back());
    return m;
  }

  /// Classes introduced strictly before session t.
  std::set<int> classes_before(std::size_t t) const {
    std::set<int> out;
    for (std::size_t k = 0; k < t && k < sessions.size(); ++k) {
      out.insert(sessions[k].class_ids.begin(), sessions[k].class_ids.end());
    }
    return out;
  }
};

/// The fixed three-session joint-shift protocol used by the benchmark suite:
/// disjoint class triples under rotated palettes and drifting noise/gamma.
inline ContinualProtocol default_joint_shift_protocol(std::size_t shots = 5,
                                                      std::size_t unlabeled = 50) {
  SessionSpec base;
  base.class_ids = {1, 2, 3};
  base.domain = {0.0, 0.05, 1.0};
  base.labeled_count = 150;
  base.unlabeled_count = 0;
  base.shots = 0;
  base.test_count = 40;

  SessionSpec s1;
  s1.class_ids = {4, 5, 6};
  s1.domain = {120.0, 0.08, 0.9};
  s1.shots = shots;
  s1.labeled_count = shots * s1.class_ids.size();
  s1.unlabeled_count = unlabeled;
  s1.test_count = 40;

  SessionSpec s2;
  s2.class_ids = {7, 8, 9};
  s2.domain = {240.0, 0.10, 1.1};
  s2.shots = shots;
  s2.labeled_count = shots * s2.class_ids.size();
  s2.unlabeled_count = unlabeled;
  s2.test_count = 40;

  return ContinualProtocol({base, s1, s2});
}

}  // namespace jascl::bench
