#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "configuration.hpp"

namespace bdswap {

// A repulsive pairwise-interaction model with density
//   f(x) = beta1^{#x} prod_{pairs} phi(rho(v, v'))
// relative to the unit-rate Poisson process. phi depends only on the distance,
// lies in [0, 1] and equals 1 beyond range(). Local stability holds with
// K = beta1.
template <typename M>
concept PairwiseInteractionModel = requires(const M& m, double d) {
  { m.activity() } -> std::convertible_to<double>;
  { m.range() } -> std::convertible_to<double>;
  { m.phi_at(d) } -> std::convertible_to<double>;
};

class StraussModel {
 public:
  StraussModel(double beta1, double beta2, double radius) : beta1_(beta1), beta2_(beta2), radius_(radius) {
    if (!(beta1 > 0.0) || !std::isfinite(beta1)) throw std::invalid_argument("Strauss beta1 must be positive");
    if (!(beta2 >= 0.0 && beta2 <= 1.0)) throw std::invalid_argument("Strauss beta2 must lie in [0, 1]");
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw std::invalid_argument("Strauss R must be nonnegative");
  }

  double activity() const noexcept { return beta1_; }
  double range() const noexcept { return radius_; }
  double beta2() const noexcept { return beta2_; }
  double phi_at(double d) const noexcept { return d <= radius_ ? beta2_ : 1.0; }

 private:
  double beta1_;
  double beta2_;
  double radius_;
};

// phi(d) = level_k for the first step with d <= radius_k, 1 beyond the last.
class PiecewisePairwiseModel {
 public:
  struct Step {
    double radius;
    double phi;
  };

  PiecewisePairwiseModel(double beta1, std::vector<Step> steps) : beta1_(beta1), steps_(std::move(steps)) {
    if (!(beta1 > 0.0) || !std::isfinite(beta1)) throw std::invalid_argument("pairwise beta1 must be positive");
    if (steps_.empty()) throw std::invalid_argument("piecewise phi needs at least one step");
    double last = 0.0;
    for (const auto& s : steps_) {
      if (!(s.radius > last)) throw std::invalid_argument("piecewise phi radii must be positive and increasing");
      if (!(s.phi >= 0.0 && s.phi <= 1.0)) {
        throw std::invalid_argument("phi outside [0, 1]: only repulsive models are supported");
      }
      last = s.radius;
    }
  }

  double activity() const noexcept { return beta1_; }
  double range() const noexcept { return steps_.back().radius; }
  const std::vector<Step>& steps() const noexcept { return steps_; }

  double phi_at(double d) const noexcept {
    for (const auto& s : steps_) {
      if (d <= s.radius) return s.phi;
    }
    return 1.0;
  }

 private:
  double beta1_;
  std::vector<Step> steps_;
};

// Smooth soft core: phi(d) = 1 - gamma (1 - (d/R)^2)^2 for d < R, else 1.
class SmoothPairwiseModel {
 public:
  SmoothPairwiseModel(double beta1, double gamma, double radius) : beta1_(beta1), gamma_(gamma), radius_(radius) {
    if (!(beta1 > 0.0) || !std::isfinite(beta1)) throw std::invalid_argument("pairwise beta1 must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
      throw std::invalid_argument("smooth phi strength must lie in [0, 1]: only repulsive models are supported");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("smooth phi range must be positive");
  }

  double activity() const noexcept { return beta1_; }
  double range() const noexcept { return radius_; }
  double gamma() const noexcept { return gamma_; }

  double phi_at(double d) const noexcept {
    if (d >= radius_) return 1.0;
    const double u = 1.0 - (d / radius_) * (d / radius_);
    return 1.0 - gamma_ * u * u;
  }

 private:
  double beta1_;
  double gamma_;
  double radius_;
};

template <PairwiseInteractionModel Model>
double interaction(const Model& model, const Point& v, const Point& w, const Window& window) {
  return model.phi_at(distance(v, w, window));
}

// Local stability constant: every model here has phi <= 1, hence K = beta1.
template <PairwiseInteractionModel Model>
double stability_constant(const Model& model) {
  return model.activity();
}

// Members w of config with phi(v, w) < 1, ascending by id. Excludes v itself
// when v is a member.
template <PairwiseInteractionModel Model>
std::vector<PointId> blockers(const Model& model, const Configuration& config, const Point& v,
                              const Window& window) {
  std::vector<PointId> candidates = config.within(v.coords, model.range(), window);
  std::erase_if(candidates, [&](PointId id) {
    return id == v.id || model.phi_at(distance(config.find(id)->coords, v.coords, window)) >= 1.0;
  });
  return candidates;
}

// n(v, x): members within distance R of v.
inline std::size_t n_near(const Configuration& config, const Point& v, double radius, const Window& window) {
  auto ids = config.within(v.coords, radius, window);
  return static_cast<std::size_t>(std::count_if(ids.begin(), ids.end(), [&](PointId id) { return id != v.id; }));
}

// s(x): unordered pairs within distance R.
inline std::size_t pair_count(const Configuration& config, double radius, const Window& window) {
  std::size_t twice = 0;
  std::vector<PointId> near;
  for (const auto& p : config) {
    config.within(p.coords, radius, window, near);
    twice += near.size() - 1;  // p itself
  }
  return twice / 2;
}

// f(x + v) / f(x) = beta1 prod_{w in x} phi(v, w).
template <PairwiseInteractionModel Model>
double papangelou_ratio(const Model& model, const Configuration& config, const Point& v, const Window& window) {
  double ratio = model.activity();
  for (PointId id : blockers(model, config, v, window)) ratio *= interaction(model, v, *config.find(id), window);
  return ratio;
}

inline double papangelou_ratio(const StraussModel& model, const Configuration& config, const Point& v,
                               const Window& window) {
  const auto n = n_near(config, v, model.range(), window);
  // 0^0 = 1: an unblocked hard-core birth is always accepted.
  return n == 0 ? model.activity() : model.activity() * std::pow(model.beta2(), static_cast<double>(n));
}

// p(x, w, v) = (1 - phi(v, w)) prod_{w' blocker of v, w' != w} phi(v, w').
template <PairwiseInteractionModel Model>
double swap_probability(const Model& model, const Configuration& config, PointId w, const Point& v,
                        const Window& window) {
  const Point* target = config.find(w);
  if (target == nullptr) throw std::invalid_argument("swap target is not in the configuration");
  const double phi_w = interaction(model, v, *target, window);
  if (phi_w >= 1.0) return 0.0;
  double p = 1.0 - phi_w;
  for (PointId id : blockers(model, config, v, window)) {
    if (id != w) p *= interaction(model, v, *config.find(id), window);
  }
  return p;
}

// 1 - [K^{-1} f(x+v)/f(x) + sum_w p(x, w, v)]; nonnegative for a legal swap move.
template <PairwiseInteractionModel Model>
double stability_margin(const Model& model, const Configuration& config, const Point& v, const Window& window) {
  double total = papangelou_ratio(model, config, v, window) / stability_constant(model);
  for (PointId id : blockers(model, config, v, window)) total += swap_probability(model, config, id, v, window);
  return 1.0 - total;
}

// log(beta1^{#x} prod phi); -inf when some pair has phi = 0.
template <PairwiseInteractionModel Model>
double unnormalized_density(const Model& model, const Configuration& config, const Window& window) {
  double log_f = static_cast<double>(config.size()) * std::log(model.activity());
  std::vector<PointId> near;
  for (const auto& p : config) {
    config.within(p.coords, model.range(), window, near);
    for (PointId id : near) {
      if (id <= p.id) continue;
      const double phi = model.phi_at(distance(p.coords, config.find(id)->coords, window));
      if (phi >= 1.0) continue;
      if (phi <= 0.0) return -std::numeric_limits<double>::infinity();
      log_f += std::log(phi);
    }
  }
  return log_f;
}

inline double unnormalized_density(const StraussModel& model, const Configuration& config, const Window& window) {
  const double log_f = static_cast<double>(config.size()) * std::log(model.activity());
  const auto s = pair_count(config, model.range(), window);
  if (s == 0) return log_f;
  if (model.beta2() <= 0.0) return -std::numeric_limits<double>::infinity();
  return log_f + static_cast<double>(s) * std::log(model.beta2());
}

// Relative gap between f(x) p(x, w, v) and f(x + v - w) p(x + v - w, v, w).
template <PairwiseInteractionModel Model>
double detailed_balance_residual(const Model& model, const Configuration& config, PointId w, const Point& v,
                                 const Window& window) {
  const Point* target = config.find(w);
  if (target == nullptr) throw std::invalid_argument("swap target is not in the configuration");
  if (config.contains(v.id)) throw std::invalid_argument("proposed point is already in the configuration");
  const Point removed = *target;

  Configuration swapped;
  if (config.has_grid()) swapped.enable_grid(window, model.range());
  for (const auto& p : config) {
    if (p.id != w) swapped.insert(p);
  }
  swapped.insert(v);

  const double log_lhs = unnormalized_density(model, config, window) +
                         std::log(swap_probability(model, config, w, v, window));
  const double log_rhs = unnormalized_density(model, swapped, window) +
                         std::log(swap_probability(model, swapped, v.id, removed, window));
  const bool lhs_zero = std::isinf(log_lhs) && log_lhs < 0;
  const bool rhs_zero = std::isinf(log_rhs) && log_rhs < 0;
  if (lhs_zero && rhs_zero) return 0.0;
  if (lhs_zero || rhs_zero) return 1.0;
  return -std::expm1(-std::abs(log_lhs - log_rhs));
}

}  // namespace bdswap
