#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "random.hpp"

namespace bdswap {

inline constexpr std::size_t kMaxDim = 3;

using PointId = std::uint64_t;
using Coords = std::array<double, kMaxDim>;

// Axis-aligned box [0, side_1] x ... x [0, side_d], optionally periodic.
class Window {
 public:
  Window() : Window(2, {1.0, 1.0, 1.0}, false) {}

  Window(std::size_t dim, std::span<const double> sides, bool torus = false) : dim_(dim), torus_(torus) {
    if (dim == 0 || dim > kMaxDim) {
      throw std::invalid_argument("window dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    if (sides.size() != 1 && sides.size() < dim) {
      throw std::invalid_argument("window needs one side length or one per axis");
    }
    sides_.fill(0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      const double s = sides.size() == 1 ? sides[0] : sides[k];
      if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("window side lengths must be positive and finite");
      sides_[k] = s;
    }
  }

  Window(std::size_t dim, std::initializer_list<double> sides, bool torus = false)
      : Window(dim, std::span<const double>(sides.begin(), sides.size()), torus) {}

  static Window unit_square() { return Window{}; }

  std::size_t dim() const noexcept { return dim_; }
  double side(std::size_t k) const noexcept { return sides_[k]; }
  bool torus() const noexcept { return torus_; }

  double volume() const noexcept {
    double v = 1.0;
    for (std::size_t k = 0; k < dim_; ++k) v *= sides_[k];
    return v;
  }

  bool contains(const Coords& c) const noexcept {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (!(c[k] >= 0.0 && c[k] <= sides_[k])) return false;
    }
    return true;
  }

 private:
  std::size_t dim_;
  std::array<double, kMaxDim> sides_{};
  bool torus_;
};

struct Point {
  PointId id = 0;
  Coords coords{};

  friend bool operator==(const Point& a, const Point& b) noexcept { return a.id == b.id; }
};

// Per-run source of fresh point ids.
class IdCounter {
 public:
  explicit IdCounter(PointId next = 0) noexcept : next_(next) {}
  PointId next() noexcept { return next_++; }
  PointId peek() const noexcept { return next_; }

 private:
  PointId next_;
};

inline double squared_distance(const Coords& a, const Coords& b, const Window& window) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < window.dim(); ++k) {
    double delta = std::abs(a[k] - b[k]);
    if (window.torus()) delta = std::min(delta, window.side(k) - delta);
    sum += delta * delta;
  }
  return sum;
}

inline double distance(const Coords& a, const Coords& b, const Window& window) noexcept {
  return std::sqrt(squared_distance(a, b, window));
}

inline double distance(const Point& p, const Point& q, const Window& window) noexcept {
  return distance(p.coords, q.coords, window);
}

inline Coords draw_uniform_coords(const Window& window, RandomStream& stream) noexcept {
  Coords c{};
  for (std::size_t k = 0; k < window.dim(); ++k) c[k] = stream.uniform() * window.side(k);
  return c;
}

inline Point draw_uniform_point(const Window& window, RandomStream& stream, IdCounter& ids) noexcept {
  return Point{ids.next(), draw_uniform_coords(window, stream)};
}

// Volume of the radius-R ball in the window's dimension. Not clipped at the
// boundary, so it upper-bounds sup_v |B(v,R) cap S|.
inline double ball_area(double radius, const Window& window) {
  if (radius < 0.0) throw std::invalid_argument("ball radius must be nonnegative");
  switch (window.dim()) {
    case 1: return 2.0 * radius;
    case 2: return std::numbers::pi * radius * radius;
    case 3: return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
    default: throw std::invalid_argument("unsupported dimension");
  }
}

}  // namespace bdswap
