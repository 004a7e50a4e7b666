#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jascl {

/// Invalid numeric input (nonpositive variance, out-of-range parameter, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Mismatched dimensions between operands.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operation invoked on an object in the wrong state (e.g. empty buffer).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A model assumption failed its construction-time audit.
struct ModelConstructionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Training produced a non-finite loss; carries the offending step index.
struct TrainingDivergenceError : std::runtime_error {
  std::size_t step;
  TrainingDivergenceError(const std::string& what, std::size_t step_index)
      : std::runtime_error(what), step(step_index) {}
};

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

/// Dense C (or D) x H x W tensor, channel-major.
struct Tensor3 {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
      : channels(c), height(h), width(w), data(c * h * w, fill) {}

  double& operator()(std::size_t c, std::size_t y, std::size_t x) {
    return data[(c * height + y) * width + x];
  }
  double operator()(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * height + y) * width + x];
  }

  std::size_t pixels() const { return height * width; }
  bool same_shape(const Tensor3& other) const {
    return channels == other.channels && height == other.height && width == other.width;
  }
};

/// H x W grid of values (labels, predictions, masks).
template <typename T>
struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t h, std::size_t w, T fill = T{}) : height(h), width(w), data(h * w, fill) {}

  T& operator()(std::size_t y, std::size_t x) { return data[y * width + x]; }
  T operator()(std::size_t y, std::size_t x) const { return data[y * width + x]; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Grid& other) const {
    return height == other.height && width == other.width;
  }
};

inline void require(bool cond, const char* what) {
  if (!cond) throw DomainError(what);
}

inline void require_shape(bool cond, const char* what) {
  if (!cond) throw ShapeError(what);
}

/// FNV-1a over a byte range; used for dataset/parameter fingerprints.
inline std::uint64_t fnv1a(const void* bytes, std::size_t n,
                           std::uint64_t seed = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull) {
  return fnv1a(s.data(), s.size(), seed);
}

}  // namespace jascl
