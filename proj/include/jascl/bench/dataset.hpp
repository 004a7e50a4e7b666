#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "jascl/bench/protocol.hpp"
#include "jascl/common.hpp"
#include "jascl/rng.hpp"

namespace jascl::bench {

/// One synthetic dense-prediction sample: grayscale image + pixel-exact labels.
struct LabeledImage {
  Grid<std::uint8_t> pixels;
  Grid<int> labels;
};

/// Splits of one session. Unlabeled images carry their ground truth only so
/// coverage/precision can be measured; the trainer never reads it as labels.
struct SessionData {
  std::vector<LabeledImage> labeled;
  std::vector<LabeledImage> unlabeled;
  std::vector<LabeledImage> test;
};

enum class ShapeKind { disk, rectangle, ring, cross, stripe };

namespace detail {

inline ShapeKind shape_for_class(int class_id) {
  return static_cast<ShapeKind>((class_id - 1) % 5);
}

/// Base palette value for a class, rotated by the session's palette angle and
/// mapped into a mid-gray band clear of the 0.05 background.
inline double class_intensity(int class_id, const DomainSpec& domain) {
  double v = 0.23 + 0.61803398874989485 * static_cast<double>(class_id);
  v += domain.palette_rotation_deg / 360.0;
  v -= std::floor(v);
  return 0.20 + 0.75 * v;
}

struct ShapePlacement {
  int class_id;
  ShapeKind kind;
  int cy, cx;
  int size;      // radius / half-extent
  int aspect;    // secondary extent for rectangles/stripes
};

inline bool covers(const ShapePlacement& p, int y, int x) {
  int dy = y - p.cy;
  int dx = x - p.cx;
  switch (p.kind) {
    case ShapeKind::disk:
      return dy * dy + dx * dx <= p.size * p.size;
    case ShapeKind::rectangle:
      return std::abs(dy) <= p.size && std::abs(dx) <= p.aspect;
    case ShapeKind::ring: {
      int r2 = dy * dy + dx * dx;
      int outer = p.size;
      int inner = std::max(1, p.size - 2);
      return r2 <= outer * outer && r2 > inner * inner;
    }
    case ShapeKind::cross:
      return (std::abs(dy) <= 1 && std::abs(dx) <= p.size) ||
             (std::abs(dx) <= 1 && std::abs(dy) <= p.size);
    case ShapeKind::stripe:
      return std::abs((y - p.cy) + (x - p.cx)) <= 2 && std::abs(dy) <= p.size &&
             std::abs(dx) <= p.size;
  }
  return false;
}

/// Render one image: 1..3 shapes on background class 0, then gamma, then
/// additive noise, quantized to 8 bits. When primary_class >= 0 the first
/// shape is forced to that class (few-shot labeled split guarantees every
/// class K appearances).
inline LabeledImage render_image(const SessionSpec& session, std::size_t H, std::size_t W,
                                 int primary_class, RngStream& rng) {
  const auto& classes = session.class_ids;
  int n_shapes = rng.uniform_int(1, 3);
  std::vector<ShapePlacement> placements;
  placements.reserve(n_shapes);
  for (int s = 0; s < n_shapes; ++s) {
    ShapePlacement p;
    p.class_id = (s == 0 && primary_class >= 0)
                     ? primary_class
                     : classes[rng.uniform_index(classes.size())];
    p.kind = shape_for_class(p.class_id);
    int margin = 4;
    p.cy = rng.uniform_int(margin, static_cast<int>(H) - 1 - margin);
    p.cx = rng.uniform_int(margin, static_cast<int>(W) - 1 - margin);
    p.size = rng.uniform_int(4, std::max(5, static_cast<int>(std::min(H, W)) / 4));
    p.aspect = rng.uniform_int(2, std::max(3, p.size));
    placements.push_back(p);
  }

  LabeledImage out{Grid<std::uint8_t>(H, W, 0), Grid<int>(H, W, 0)};
  const double background = 0.05;
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      double value = background;
      int label = 0;
      // Later placements overdraw earlier ones.
      for (const auto& p : placements) {
        if (covers(p, static_cast<int>(y), static_cast<int>(x))) {
          value = class_intensity(p.class_id, session.domain);
          label = p.class_id;
        }
      }
      value = std::pow(value, session.domain.intensity_gamma);
      value += session.domain.noise_sigma * rng.normal();
      value = std::clamp(value, 0.0, 1.0);
      out.pixels(y, x) = static_cast<std::uint8_t>(std::lround(value * 255.0));
      out.labels(y, x) = label;
    }
  }
  return out;
}

}  // namespace detail

inline std::uint64_t image_hash(const LabeledImage& img) {
  std::uint64_t h = fnv1a(img.pixels.data.data(), img.pixels.data.size());
  return fnv1a(img.labels.data.data(), img.labels.data.size() * sizeof(int), h);
}

/// Deterministic per-session datasets for a validated protocol. The labeled
/// split of an incremental session holds exactly K images per class with that
/// class as the guaranteed primary shape; unlabeled and test splits sample
/// shapes freely from the session's class set.
inline std::vector<SessionData> generate_protocol_data(const ContinualProtocol& protocol,
                                                       std::size_t height, std::size_t width,
                                                       std::uint64_t seed) {
  require(height >= 16 && width >= 16, "generate_protocol_data: image size must be >= 16");
  RngRoot root = RngRoot(seed).child("bench/data");

  std::vector<SessionData> out(protocol.sessions.size());
  std::set<std::uint64_t> seen_hashes;
  for (std::size_t t = 0; t < protocol.sessions.size(); ++t) {
    const SessionSpec& spec = protocol.sessions[t];
    SessionData& data = out[t];
    std::string base = "session" + std::to_string(t);

    auto emit = [&](std::vector<LabeledImage>& split, const char* name, std::size_t count) {
      RngStream rng = root.stream(base + "/" + name);
      for (std::size_t i = 0; i < count; ++i) {
        split.push_back(detail::render_image(spec, height, width, -1, rng));
        if (!seen_hashes.insert(image_hash(split.back())).second) {
          throw StateError("generate_protocol_data: split collision (identical image)");
        }
      }
    };

    if (t == 0) {
      emit(data.labeled, "labeled", spec.labeled_count);
    } else {
      // Class-major order: shots images for each class in turn.
      RngStream rng = root.stream(base + "/labeled");
      for (int cid : spec.class_ids) {
        for (std::size_t k = 0; k < spec.shots; ++k) {
          data.labeled.push_back(detail::render_image(spec, height, width, cid, rng));
          if (!seen_hashes.insert(image_hash(data.labeled.back())).second) {
            throw StateError("generate_protocol_data: split collision (identical image)");
          }
        }
      }
    }
    emit(data.unlabeled, "unlabeled", spec.unlabeled_count);
    emit(data.test, "test", spec.test_count);
  }
  return out;
}

}  // namespace jascl::bench
