#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcftp.hpp"
#include "models.hpp"
#include "stats.hpp"

namespace bdswap {

class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleDraw {
  Configuration sample;
  std::size_t attempts = 0;
};

// Exact sampler built from the density alone: propose a Poisson process of
// intensity beta1 and accept with probability prod_{pairs} phi. Shares no
// code with the chains; pair interactions are found by a direct O(n^2) scan.
template <PairwiseInteractionModel Model>
OracleDraw rejection_oracle(const Model& model, const Window& window, RandomStream& stream,
                            std::size_t max_attempts = 10'000'000) {
  IdCounter ids;
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    const auto n = stream.poisson(model.activity() * window.volume());
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) pts.push_back(draw_uniform_point(window, stream, ids));
    double accept = 1.0;
    for (std::size_t i = 0; i < pts.size() && accept > 0.0; ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) accept *= model.phi_at(distance(pts[i], pts[j], window));
    }
    if (stream.uniform() < accept) {
      OracleDraw out;
      for (const auto& p : pts) out.sample.insert(p);
      out.attempts = attempt;
      return out;
    }
  }
  throw OracleFailure("rejection oracle exceeded " + std::to_string(max_attempts) + " attempts");
}

// Count and pair-count summary of one sample.
struct SampleSummary {
  std::uint64_t count = 0;
  std::uint64_t pairs = 0;
};

inline SampleSummary summarize(const Configuration& x, double radius, const Window& window) {
  std::uint64_t pairs = 0;
  std::vector<Point> pts(x.begin(), x.end());
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) pairs += squared_distance(pts[i].coords, pts[j].coords, window) <= r2;
  }
  return {x.size(), pairs};
}

struct TwoSampleReport {
  stats::TestResult count_chi_square;
  stats::TestResult pairs_mean;
  stats::TestResult pairs_spread;
  double p_value = 1.0;  // Bonferroni over the three component tests
  bool passes(double alpha) const noexcept { return p_value >= alpha; }
};

// Chi-square on #X histograms plus mean and spread comparisons of s(X).
inline TwoSampleReport two_sample_count_test(std::span<const SampleSummary> a, std::span<const SampleSummary> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("two-sample test needs at least two samples each");
  std::vector<std::uint64_t> ca, cb;
  std::vector<double> sa, sb;
  for (const auto& s : a) {
    ca.push_back(s.count);
    sa.push_back(static_cast<double>(s.pairs));
  }
  for (const auto& s : b) {
    cb.push_back(s.count);
    sb.push_back(static_cast<double>(s.pairs));
  }
  TwoSampleReport r;
  r.count_chi_square = stats::two_sample_chi_square(ca, cb);
  r.pairs_mean = stats::two_sample_mean_z(sa, sb);
  r.pairs_spread = stats::two_sample_spread_z(sa, sb);
  const double pmin = std::min({r.count_chi_square.p_value, r.pairs_mean.p_value, r.pairs_spread.p_value});
  r.p_value = std::min(1.0, 3.0 * pmin);
  return r;
}

struct AuditResult {
  bool pass = true;
  std::optional<std::size_t> first_violation;  // step within the trace
  std::string detail;
};

// State of the bounding pair (and optionally a sandwiched Y) after one event.
struct SandwichSnapshot {
  std::uint64_t event_index = 0;
  std::vector<PointId> lower, upper, dominating;
  std::optional<std::vector<PointId>> sandwiched;
};

inline bool sorted_subset(const std::vector<PointId>& a, const std::vector<PointId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Checks L subset Y subset U subset D at every snapshot (id lists ascending).
inline AuditResult sandwich_audit(const std::vector<SandwichSnapshot>& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& s = trace[i];
    std::string why;
    if (s.sandwiched) {
      if (!sorted_subset(s.lower, *s.sandwiched)) why = "L not contained in Y";
      else if (!sorted_subset(*s.sandwiched, s.upper)) why = "Y not contained in U";
    } else if (!sorted_subset(s.lower, s.upper)) {
      why = "L not contained in U";
    }
    if (why.empty() && !sorted_subset(s.upper, s.dominating)) why = "U not contained in D";
    if (!why.empty()) return {false, i, why + " after event " + std::to_string(s.event_index)};
  }
  return {};
}

inline std::vector<PointId> sorted_ids(const Configuration& x) { return x.ids(); }

template <PairwiseInteractionModel Model>
SandwichSnapshot snapshot(const BoundingChain<Model>& chain, std::uint64_t index, const Configuration* y = nullptr) {
  SandwichSnapshot s;
  s.event_index = index;
  s.lower = chain.lower_ids();
  s.upper = chain.upper().ids();
  s.dominating = chain.dominating().ids();
  if (y) s.sandwiched = y->ids();
  return s;
}

// Replays the first n rows of a backward log, recording (L, U, D) after every
// event. When y_start is given, a chain Y started there is stepped with the
// same per-blocker outcomes and swap decision as the bounding pair.
template <PairwiseInteractionModel Model>
std::vector<SandwichSnapshot> trace_replay(const Model& model, const Window& window, const EventLog& log,
                                           std::size_t n, double p_swap,
                                           const std::optional<Configuration>& y_start = std::nullopt) {
  const auto start = state_at_backward_depth(log, n);
  std::optional<Configuration> y;
  if (y_start) {
    y.emplace();
    for (const auto& p : *y_start) y->insert(p);
  }
  std::vector<SandwichSnapshot> trace;
  trace.reserve(n);
  replay(model, window, log, start, n, p_swap, [&](const Event& e, const BoundingChain<Model>& chain) {
    if (y) {
      if (e.kind == EventKind::death) {
        y->erase(e.point.id);
      } else {
        apply_birth_with_outcomes(*y, e.point, chain.last_outcomes(), chain.last_swap());
      }
    }
    trace.push_back(snapshot(chain, e.index, y ? &*y : nullptr));
  });
  return trace;
}

// Replays depth n and depth n_prime >= n of a backward log in lockstep and
// checks L_n subset L_n' subset U_n' subset U_n at every shared event. The
// deeper replay reads its rows from log_prime (normally the same log).
template <PairwiseInteractionModel Model>
AuditResult funnel_audit(const Model& model, const Window& window, const EventLog& log, const EventLog& log_prime,
                         std::size_t n, std::size_t n_prime, double p_swap) {
  if (n_prime < n) throw std::invalid_argument("funnel audit needs n <= n_prime");
  BoundingChain<Model> deep(model, window, p_swap, state_at_backward_depth(log_prime, n_prime));
  for (std::size_t i = n_prime; i-- > n;) deep.apply(log_prime.events[i]);
  BoundingChain<Model> shallow(model, window, p_swap, state_at_backward_depth(log, n));
  auto check = [&](std::size_t step) -> std::optional<AuditResult> {
    const auto ls = shallow.lower_ids(), ld = deep.lower_ids();
    const auto us = shallow.upper().ids(), ud = deep.upper().ids();
    std::string why;
    if (!sorted_subset(ls, ld)) why = "L_N not contained in L_N'";
    else if (!sorted_subset(ld, ud)) why = "L_N' not contained in U_N'";
    else if (!sorted_subset(ud, us)) why = "U_N' not contained in U_N";
    if (why.empty()) return std::nullopt;
    return AuditResult{false, step, why + " at shared step " + std::to_string(step)};
  };
  if (auto bad = check(0)) return *bad;
  for (std::size_t i = n, step = 1; i-- > 0; ++step) {
    shallow.apply(log.events[i]);
    deep.apply(log_prime.events[i]);
    if (auto bad = check(step)) return *bad;
  }
  return {};
}

}  // namespace bdswap
