#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "space.hpp"

namespace bdswap {

// Dense uniform grid over the window holding point ids, for fixed-radius
// queries with radius at most the cell side.
class SpatialGrid {
 public:
  static constexpr std::size_t kMaxCellsPerAxis = 256;

  SpatialGrid(const Window& window, double radius) : window_(window), radius_(radius) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < window.dim(); ++k) {
      std::size_t cells = 1;
      if (radius > 0.0) {
        cells = static_cast<std::size_t>(std::floor(window.side(k) / radius));
      } else {
        cells = kMaxCellsPerAxis;
      }
      cells_[k] = std::clamp<std::size_t>(cells, 1, kMaxCellsPerAxis);
      cell_side_[k] = window.side(k) / static_cast<double>(cells_[k]);
      total *= cells_[k];
    }
    buckets_.resize(total);
  }

  double radius() const noexcept { return radius_; }

  void insert(const Point& p) { buckets_[cell_of(p.coords)].push_back(p.id); }

  void erase(const Point& p) {
    auto& bucket = buckets_[cell_of(p.coords)];
    auto it = std::find(bucket.begin(), bucket.end(), p.id);
    if (it != bucket.end()) {
      *it = bucket.back();
      bucket.pop_back();
    }
  }

  void clear() {
    for (auto& b : buckets_) b.clear();
  }

  // Calls visit(id) once for every id stored in a cell that may hold a point
  // within radius() of c.
  template <typename Visit>
  void for_each_candidate(const Coords& c, Visit&& visit) const {
    std::array<std::size_t, kMaxDim> lo{}, count{}, base{};
    for (std::size_t k = 0; k < window_.dim(); ++k) {
      base[k] = axis_cell(c[k], k);
      // A 3-wide neighborhood covers every cell when there are < 3 cells.
      count[k] = std::min<std::size_t>(3, cells_[k]);
      lo[k] = base[k];
    }
    std::array<std::size_t, kMaxDim> step{};
    for (;;) {
      std::size_t flat = 0;
      bool valid = true;
      for (std::size_t k = window_.dim(); k-- > 0;) {
        long cell = static_cast<long>(lo[k]) + static_cast<long>(step[k]) - (count[k] == 3 ? 1 : 0);
        if (count[k] < 3) {
          cell = static_cast<long>(step[k]);
        } else if (window_.torus()) {
          const long n = static_cast<long>(cells_[k]);
          cell = ((cell % n) + n) % n;
        } else if (cell < 0 || cell >= static_cast<long>(cells_[k])) {
          valid = false;
        }
        flat = flat * cells_[k] + static_cast<std::size_t>(valid ? cell : 0);
      }
      if (valid) {
        for (PointId id : buckets_[flat]) visit(id);
      }
      std::size_t k = 0;
      for (; k < window_.dim(); ++k) {
        if (++step[k] < count[k]) break;
        step[k] = 0;
      }
      if (k == window_.dim()) break;
    }
  }

 private:
  std::size_t axis_cell(double x, std::size_t k) const noexcept {
    auto i = static_cast<long>(std::floor(x / cell_side_[k]));
    return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(cells_[k]) - 1));
  }

  std::size_t cell_of(const Coords& c) const noexcept {
    std::size_t flat = 0;
    for (std::size_t k = window_.dim(); k-- > 0;) flat = flat * cells_[k] + axis_cell(c[k], k);
    return flat;
  }

  Window window_;
  double radius_;
  std::array<std::size_t, kMaxDim> cells_{};
  std::array<double, kMaxDim> cell_side_{};
  std::vector<std::vector<PointId>> buckets_;
};

// A finite set of points indexed by id. Members are stored contiguously so a
// uniformly random member can be picked by position.
class Configuration {
 public:
  Configuration() = default;

  // With a grid of cell side `radius`, range queries up to that radius are
  // answered from neighboring cells instead of a full scan.
  Configuration(const Window& window, double radius) { enable_grid(window, radius); }

  void enable_grid(const Window& window, double radius) {
    grid_.emplace(window, radius);
    for (const auto& p : points_) grid_->insert(p);
  }

  bool has_grid() const noexcept { return grid_.has_value(); }

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }
  const Point& at_position(std::size_t i) const { return points_.at(i); }

  bool contains(PointId id) const noexcept { return index_.contains(id); }

  const Point* find(PointId id) const noexcept {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &points_[it->second];
  }

  void insert(const Point& p) {
    if (!index_.emplace(p.id, points_.size()).second) {
      throw std::invalid_argument("duplicate point id " + std::to_string(p.id));
    }
    points_.push_back(p);
    if (grid_) grid_->insert(p);
  }

  // Returns false when id is not a member.
  bool erase(PointId id) {
    auto it = index_.find(id);
    if (it == index_.end()) return false;
    const std::size_t pos = it->second;
    if (grid_) grid_->erase(points_[pos]);
    index_.erase(it);
    if (pos + 1 != points_.size()) {
      points_[pos] = points_.back();
      index_[points_[pos].id] = pos;
    }
    points_.pop_back();
    return true;
  }

  void clear() {
    points_.clear();
    index_.clear();
    if (grid_) grid_->clear();
  }

  // Ids of members within distance `radius` of c (inclusive), ascending.
  std::vector<PointId> within(const Coords& c, double radius, const Window& window) const {
    std::vector<PointId> out;
    within(c, radius, window, out);
    return out;
  }

  void within(const Coords& c, double radius, const Window& window, std::vector<PointId>& out) const {
    out.clear();
    const double r2 = radius * radius;
    if (grid_ && radius <= grid_->radius()) {
      grid_->for_each_candidate(c, [&](PointId id) {
        if (squared_distance(points_[index_.at(id)].coords, c, window) <= r2) out.push_back(id);
      });
    } else {
      for (const auto& p : points_) {
        if (squared_distance(p.coords, c, window) <= r2) out.push_back(p.id);
      }
    }
    std::sort(out.begin(), out.end());
  }

  // Member ids in ascending order.
  std::vector<PointId> ids() const {
    std::vector<PointId> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.id);
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    if (a.size() != b.size()) return false;
    for (const auto& p : a.points_) {
      if (!b.contains(p.id)) return false;
    }
    return true;
  }

 private:
  std::vector<Point> points_;
  std::unordered_map<PointId, std::size_t> index_;
  std::optional<SpatialGrid> grid_;
};

// Homogeneous Poisson process of the given intensity on the window.
inline Configuration poisson_point_process(const Window& window, double intensity, RandomStream& stream,
                                           IdCounter& ids) {
  if (intensity < 0.0 || !std::isfinite(intensity)) {
    throw std::invalid_argument("Poisson intensity must be nonnegative and finite");
  }
  Configuration config;
  const auto n = stream.poisson(intensity * window.volume());
  for (std::uint64_t i = 0; i < n; ++i) config.insert(draw_uniform_point(window, stream, ids));
  return config;
}

}  // namespace bdswap
