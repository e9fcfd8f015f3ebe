#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "chain.hpp"
#include "dominating.hpp"
#include "models.hpp"

namespace bdswap {

// Changes to (L, U) prescribed by the birth-update table.
struct BirthActions {
  bool add_to_lower = false;
  bool add_to_upper = false;
  std::optional<PointId> remove_from_lower;
  std::optional<PointId> remove_from_upper;

  friend bool operator==(const BirthActions&, const BirthActions&) = default;
};

// Birth-update table. lower_survivors / upper_survivors are the blockers of v
// in L and U still standing after the shared mark loop (ascending ids, lower a
// subset of upper); swap is the Bernoulli(p_swap) outcome.
inline BirthActions birth_update(std::span<const PointId> lower_survivors, std::span<const PointId> upper_survivors,
                                 bool swap) {
  if (!std::includes(upper_survivors.begin(), upper_survivors.end(), lower_survivors.begin(),
                     lower_survivors.end())) {
    throw std::invalid_argument("lower blocker set is not contained in the upper blocker set");
  }
  const std::size_t nl = lower_survivors.size();
  const std::size_t nu = upper_survivors.size();
  BirthActions a;
  if (!swap) {
    if (nl == 0 && nu == 0) {
      a.add_to_lower = a.add_to_upper = true;
    } else if (nl == 0) {
      a.add_to_upper = true;
    }
    return a;
  }
  if (nl == 0 && nu == 0) {
    a.add_to_lower = a.add_to_upper = true;
  } else if (nl == 0 && nu == 1) {
    a.add_to_lower = a.add_to_upper = true;
    a.remove_from_upper = upper_survivors.front();
  } else if (nl == 0) {
    a.add_to_upper = true;
  } else if (nl == 1 && nu == 1) {
    a.add_to_lower = a.add_to_upper = true;
    a.remove_from_lower = lower_survivors.front();
    a.remove_from_upper = upper_survivors.front();
  } else if (nl == 1) {
    a.remove_from_lower = lower_survivors.front();
    a.add_to_upper = true;
  }
  return a;
}

// The bounding pair (L, U) together with D, advanced one dominating event at a
// time. L is kept as a set of ids; U holds coordinates and a neighbor grid.
template <PairwiseInteractionModel Model>
class BoundingChain {
 public:
  BoundingChain(const Model& model, const Window& window, double p_swap, const Configuration& dominating_start,
                bool coalesced_shortcut = true)
      : model_(&model),
        window_(window),
        p_swap_(p_swap),
        shortcut_(coalesced_shortcut),
        dominating_(dominating_start),
        upper_(window, model.range()) {
    if (!(p_swap >= 0.0 && p_swap <= 1.0)) throw std::invalid_argument("p_swap must lie in [0, 1]");
    dominating_.enable_grid(window, model.range());
    for (const auto& p : dominating_start) upper_.insert(p);
  }

  void apply(const Event& e) {
    last_outcomes_.clear();
    if (e.kind == EventKind::death) {
      if (!dominating_.erase(e.point.id)) {
        throw std::invalid_argument("death of point " + std::to_string(e.point.id) + " not in the dominating process");
      }
      upper_.erase(e.point.id);
      lower_.erase(e.point.id);
      return;
    }
    if (dominating_.contains(e.point.id)) {
      throw std::invalid_argument("birth of point " + std::to_string(e.point.id) + " already alive");
    }
    // Outcomes are drawn over the blockers in D, so each point's outcome
    // depends on the event alone and is shared by every chain replaying it.
    dominating_.within(e.point.coords, model_->range(), window_, scratch_);
    std::erase_if(scratch_, [&](PointId id) {
      return model_->phi_at(distance(dominating_.find(id)->coords, e.point.coords, window_)) >= 1.0;
    });
    last_outcomes_ = test_blockers(*model_, dominating_, scratch_, e.point, e.mark, window_);
    last_swap_ = swap_selected(e, p_swap_);
    dominating_.insert(e.point);

    upper_survivors_.clear();
    lower_survivors_.clear();
    const bool same = shortcut_ && coalesced();
    for (const auto& o : last_outcomes_) {
      if (!o.blocks || !upper_.contains(o.id)) continue;
      upper_survivors_.push_back(o.id);
      if (same || lower_.contains(o.id)) lower_survivors_.push_back(o.id);
    }
    const BirthActions a = birth_update(lower_survivors_, upper_survivors_, last_swap_);
    if (a.remove_from_upper) upper_.erase(*a.remove_from_upper);
    if (a.remove_from_lower) lower_.erase(*a.remove_from_lower);
    if (a.add_to_upper) upper_.insert(e.point);
    if (a.add_to_lower) lower_.insert(e.point.id);
  }

  bool coalesced() const noexcept { return lower_.size() == upper_.size(); }
  std::size_t gap() const noexcept { return upper_.size() - lower_.size(); }

  const Configuration& upper() const noexcept { return upper_; }
  const Configuration& dominating() const noexcept { return dominating_; }
  bool in_lower(PointId id) const noexcept { return lower_.contains(id); }
  std::size_t lower_size() const noexcept { return lower_.size(); }

  std::vector<PointId> lower_ids() const {
    std::vector<PointId> out(lower_.begin(), lower_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  Configuration lower_configuration() const {
    Configuration out;
    for (const auto& p : upper_) {
      if (lower_.contains(p.id)) out.insert(p);
    }
    return out;
  }

  // Per-blocker outcomes (over the blockers in D) and swap decision of the
  // most recent birth; empty after a death.
  const std::vector<BlockerOutcome>& last_outcomes() const noexcept { return last_outcomes_; }
  bool last_swap() const noexcept { return last_swap_; }

 private:
  const Model* model_;
  Window window_;
  double p_swap_;
  bool shortcut_;
  Configuration dominating_;
  Configuration upper_;
  std::unordered_set<PointId> lower_;
  std::vector<PointId> scratch_;
  std::vector<PointId> upper_survivors_;
  std::vector<PointId> lower_survivors_;
  std::vector<BlockerOutcome> last_outcomes_;
  bool last_swap_ = false;
};

// The dominating process on (-inf, 0], materialised lazily backward from a
// Poisson D(0). Rows once generated are never modified.
class BackwardDominating {
 public:
  BackwardDominating(const Window& window, double intensity, std::uint64_t seed)
      : window_(window), intensity_(intensity), seed_(seed) {
    if (!(intensity > 0.0)) throw std::invalid_argument("dominating intensity must be positive");
    log_.direction = LogDirection::backward;
    log_.anchor = start_dominating(window, intensity, seed, ids_);
    earliest_ = log_.anchor;
  }

  // Ensures at least n rows exist.
  void extend_to(std::size_t n) {
    if (n <= log_.events.size()) return;
    auto [earlier, rows] = extend_backward(std::move(earliest_), n - log_.events.size(), intensity_, window_, seed_,
                                           ids_, log_.events.size() + 1);
    earliest_ = std::move(earlier);
    log_.events.insert(log_.events.end(), rows.begin(), rows.end());
  }

  std::size_t size() const noexcept { return log_.events.size(); }
  const EventLog& log() const noexcept { return log_; }
  const Configuration& anchor() const noexcept { return log_.anchor; }
  const Window& window() const noexcept { return window_; }

  // D(tau_n).
  Configuration state_at_depth(std::size_t n) const {
    if (n == log_.events.size()) return earliest_;
    return state_at_backward_depth(log_, n);
  }

 private:
  Window window_;
  double intensity_;
  std::uint64_t seed_;
  IdCounter ids_;
  EventLog log_;
  Configuration earliest_;
};

// Replays rows n..1 of a backward log forward from (empty, D(tau_n)).
// observe(event, chain) runs after every event.
template <PairwiseInteractionModel Model, typename Observer>
BoundingChain<Model> replay(const Model& model, const Window& window, const EventLog& log,
                            const Configuration& start, std::size_t n, double p_swap, Observer&& observe,
                            bool coalesced_shortcut = true) {
  if (n > log.events.size()) throw std::out_of_range("backward log shorter than the requested replay depth");
  BoundingChain<Model> chain(model, window, p_swap, start, coalesced_shortcut);
  for (std::size_t i = n; i-- > 0;) {
    chain.apply(log.events[i]);
    observe(log.events[i], chain);
  }
  return chain;
}

// Returns (L_n(0), U_n(0)) for the first n rows of a backward log.
template <PairwiseInteractionModel Model>
std::pair<Configuration, Configuration> replay(const Model& model, const Window& window, const EventLog& log,
                                               std::size_t n, double p_swap) {
  const auto start = state_at_backward_depth(log, n);
  auto chain = replay(model, window, log, start, n, p_swap, [](const Event&, const BoundingChain<Model>&) {});
  Configuration upper;
  for (const auto& p : chain.upper()) upper.insert(p);
  return {chain.lower_configuration(), std::move(upper)};
}

struct CftpOptions {
  std::size_t initial_events = 0;  // 0 selects ceil(K |S|)
  std::size_t doubling_cap = 40;
  bool coalesced_shortcut = true;
};

struct CftpResult {
  Configuration sample;
  std::size_t events = 0;           // rows of the backward log generated
  std::size_t events_replayed = 0;  // summed over all replays
  std::size_t doublings = 0;
  double wall_ms = 0.0;
};

class CoalescenceFailure : public std::runtime_error {
 public:
  CoalescenceFailure(std::size_t events, std::size_t doublings)
      : std::runtime_error("no coalescence after " + std::to_string(doublings) + " doublings (" +
                           std::to_string(events) + " events)"),
        events_(events),
        doublings_(doublings) {}
  std::size_t events() const noexcept { return events_; }
  std::size_t doublings() const noexcept { return doublings_; }

 private:
  std::size_t events_;
  std::size_t doublings_;
};

inline std::size_t default_initial_events(double intensity, const Window& window) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(intensity * window.volume())));
}

// Dominated coupling from the past with doubling. The same backward rows
// (marks and swap uniforms included) are reused by every replay. Throws
// CoalescenceFailure past the doubling cap.
template <PairwiseInteractionModel Model>
CftpResult dominated_cftp(const Model& model, const Window& window, double p_swap, std::uint64_t seed,
                          const CftpOptions& options = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const double intensity = stability_constant(model);
  BackwardDominating process(window, intensity, seed);
  std::size_t n = options.initial_events > 0 ? options.initial_events : default_initial_events(intensity, window);
  CftpResult result;
  for (std::size_t round = 0;; ++round) {
    process.extend_to(n);
    const auto start = process.state_at_depth(n);
    auto chain = replay(model, window, process.log(), start, n, p_swap,
                        [](const Event&, const BoundingChain<Model>&) {}, options.coalesced_shortcut);
    result.events_replayed += n;
    if (chain.coalesced()) {
      result.sample = chain.lower_configuration();
      result.events = n;
      result.doublings = round;
      break;
    }
    if (round >= options.doubling_cap) throw CoalescenceFailure(n, round);
    n *= 2;
  }
  result.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace bdswap
