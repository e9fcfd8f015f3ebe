#pragma once

#include <algorithm>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dominating.hpp"
#include "event_log_io.hpp"
#include "models.hpp"

namespace bdswap {

// Result of testing a birth at v against one potential blocker w.
// `blocks` is true when the Bernoulli(phi(v, w)) draw came up 0.
struct BlockerOutcome {
  PointId id;
  bool blocks;
};

// Tests each candidate (ascending id) against the birth mark. A mark below
// phi means w does not block and the mark is rescaled to M / phi; otherwise w
// blocks and the mark becomes (1 - M) / (1 - phi). Either way the mark is again
// uniform on [0, 1] and independent of the outcomes so far.
template <PairwiseInteractionModel Model>
std::vector<BlockerOutcome> test_blockers(const Model& model, const Configuration& pool,
                                          std::span<const PointId> candidates, const Point& v, double mark,
                                          const Window& window) {
  std::vector<BlockerOutcome> out;
  out.reserve(candidates.size());
  for (PointId id : candidates) {
    const double phi = interaction(model, v, *pool.find(id), window);
    if (mark < phi) {
      out.push_back({id, false});
      mark /= phi;
    } else {
      out.push_back({id, true});
      mark = (1.0 - mark) / (1.0 - phi);
    }
  }
  return out;
}

inline bool swap_selected(const Event& birth, double p_swap) noexcept { return birth.swap_uniform < p_swap; }

// Birth decision for a single configuration given its surviving blockers:
// no survivor adds v; exactly one survivor and a selected swap replaces it by v.
inline void apply_birth_decision(Configuration& x, const Point& v, std::span<const PointId> survivors, bool swap) {
  if (survivors.empty()) {
    x.insert(v);
  } else if (survivors.size() == 1 && swap) {
    x.erase(survivors.front());
    x.insert(v);
  }
}

// Applies a birth to x using outcomes computed on a superset of x's blockers
// (as the bounding chain does over U). Only outcomes for members of x count.
inline void apply_birth_with_outcomes(Configuration& x, const Point& v, std::span<const BlockerOutcome> outcomes,
                                      bool swap) {
  std::vector<PointId> survivors;
  for (const auto& o : outcomes) {
    if (o.blocks && x.contains(o.id)) survivors.push_back(o.id);
  }
  apply_birth_decision(x, v, survivors, swap);
}

// One step of the birth-death-swap chain X driven by a dominating event.
// `dominating` is D before the event and is advanced with it.
template <PairwiseInteractionModel Model>
void apply_event(const Model& model, Configuration& dominating, Configuration& x, const Event& e, double p_swap,
                 const Window& window) {
  if (e.kind == EventKind::death) {
    if (!dominating.contains(e.point.id)) {
      throw std::invalid_argument("death of point " + std::to_string(e.point.id) + " not in the dominating process");
    }
    dominating.erase(e.point.id);
    x.erase(e.point.id);
    return;
  }
  if (dominating.contains(e.point.id)) {
    throw std::invalid_argument("birth of point " + std::to_string(e.point.id) + " already in the dominating process");
  }
  // The mark is spent over the blockers in D; x only reads the outcomes of
  // its own points. This is the coupling the bounding chains use.
  const auto candidates = blockers(model, dominating, e.point, window);
  const auto outcomes = test_blockers(model, dominating, candidates, e.point, e.mark, window);
  dominating.insert(e.point);
  apply_birth_with_outcomes(x, e.point, outcomes, swap_selected(e, p_swap));
}

// Runs X forward through a forward log starting from x0 (which must be a
// subset of the log's anchor). observe(event, dominating, x) is called after
// every event.
template <PairwiseInteractionModel Model, typename Observer>
Configuration run_chain(const Model& model, const Configuration& x0, const EventLog& log, double p_swap,
                        const Window& window, Observer&& observe) {
  Configuration dominating = log.anchor;
  dominating.enable_grid(window, model.range());
  Configuration x(window, model.range());
  for (const auto& p : x0) {
    if (!dominating.contains(p.id)) throw std::invalid_argument("initial state is not dominated");
    x.insert(p);
  }
  for (const Event& e : replay_order(log)) {
    apply_event(model, dominating, x, e, p_swap, window);
    observe(e, dominating, x);
  }
  return x;
}

template <PairwiseInteractionModel Model>
Configuration run_chain(const Model& model, const Configuration& x0, const EventLog& log, double p_swap,
                        const Window& window) {
  return run_chain(model, x0, log, p_swap, window, [](const Event&, const Configuration&, const Configuration&) {});
}

// One JSON object per line: {"index":i,"size":n,"ids":[...]}.
inline void write_trajectory_line(std::ostream& out, std::uint64_t index, const Configuration& x) {
  out << "{\"index\":" << index << ",\"size\":" << x.size() << ",\"ids\":[";
  bool first = true;
  for (PointId id : x.ids()) {
    out << (first ? "" : ",") << id;
    first = false;
  }
  out << "]}\n";
}

}  // namespace bdswap
