#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dcftp.hpp"
#include "event_log_io.hpp"
#include "models.hpp"
#include "stats.hpp"

namespace bdswap {

enum class BoundVariant { no_swap, quarter_swap };

inline const char* to_string(BoundVariant v) { return v == BoundVariant::no_swap ? "no_swap" : "quarter_swap"; }

struct BoundParameters {
  double beta1 = 1.0;
  double beta2 = 0.5;
  double ball = 0.0;    // r = sup_v |B(v, R)|
  double volume = 1.0;  // |S|
};

// 1 - c beta1 (1 - beta2) r, with c = 1 without swaps and 1/2 with quarter-rate
// swaps. The bounds hold only while this is positive.
inline double contraction(const BoundParameters& p, BoundVariant v) {
  const double load = p.beta1 * (1.0 - p.beta2) * p.ball;
  return 1.0 - (v == BoundVariant::no_swap ? 1.0 : 0.5) * load;
}

inline bool in_regime(const BoundParameters& p, BoundVariant v) { return contraction(p, v) > 0.0; }

// Upper bound on P(U_N(0) != L_N(0)):
//   2 exp(-0.09 N) + beta1 |S| exp(-N c / (4 beta1 |S|)), clamped to [0, 1].
inline double theorem_bound(double n_events, const BoundParameters& p, BoundVariant v) {
  if (!in_regime(p, v)) {
    throw std::domain_error(std::string("coalescence bound requires beta1 (1 - beta2) r < ") +
                            (v == BoundVariant::no_swap ? "1" : "2"));
  }
  const double mass = p.beta1 * p.volume;
  const double b = 2.0 * std::exp(-0.09 * n_events) + mass * std::exp(-n_events * contraction(p, v) / (4.0 * mass));
  return std::clamp(b, 0.0, 1.0);
}

// Finite upper bound on the expected number of events generated by dCFTP with
// doubling. Writing the coalescence bound as a exp(-b N) with a = 2 + beta1|S|
// and b = min(0.09, c / (4 beta1 |S|)):
//   E[T] <= n0 + a exp(-b n0 / 2) / (1 - exp(-b / 2)),  n0 = ceil((2 / b) ln a).
inline double expected_events_bound(const BoundParameters& p, BoundVariant v) {
  if (!in_regime(p, v)) throw std::domain_error("expected-events bound diverges outside the contraction regime");
  const double mass = p.beta1 * p.volume;
  const double a = 2.0 + mass;
  const double b = std::min(0.09, contraction(p, v) / (4.0 * mass));
  const double n0 = std::ceil(2.0 / b * std::log(a));
  const double tail = a * std::exp(-b * n0 / 2.0) / -std::expm1(-b / 2.0);
  const double total = n0 + tail;
  if (!(b > 0.0) || !std::isfinite(total)) throw std::domain_error("expected-events bound diverges");
  return total;
}

struct GridCell {
  double beta1 = 40.0;
  double beta2 = 0.5;
  double radius = 0.1;
  double p_swap = 1.0;
  Window window;
};

struct SweepRow {
  GridCell cell;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t events = 0;
  std::size_t doublings = 0;
  bool coalesced = false;
  double wall_ms = 0.0;
  std::uint64_t prefix_digest = 0;  // hash of the first ceil(beta1|S|) backward rows
  std::string error;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline auto cell_key(const GridCell& c) {
  return std::make_tuple(c.beta1, c.beta2, c.radius, c.p_swap, c.window.volume());
}

}  // namespace detail

inline std::size_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Runs `replications` dCFTP calls per cell. Replication k uses seed
// derive_seed(base_seed, k) in every cell, so cells differing only in p_swap
// replay identical event logs. Failures are recorded per row.
inline std::vector<SweepRow> sweep(const std::vector<GridCell>& grid, std::size_t replications,
                                   std::uint64_t base_seed, std::size_t threads = default_threads(),
                                   std::size_t doubling_cap = 40) {
  std::vector<SweepRow> rows(grid.size() * replications);
  detail::parallel_for(rows.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.cell = grid[i / replications];
    row.rep = i % replications;
    row.seed = derive_seed(base_seed, row.rep);
    try {
      const StraussModel model(row.cell.beta1, row.cell.beta2, row.cell.radius);
      CftpOptions opt;
      opt.doubling_cap = doubling_cap;
      const auto res = dominated_cftp(model, row.cell.window, row.cell.p_swap, row.seed, opt);
      row.events = res.events;
      row.doublings = res.doublings;
      row.coalesced = true;
      row.wall_ms = res.wall_ms;
      BackwardDominating prefix(row.cell.window, model.activity(), row.seed);
      const auto n0 = default_initial_events(model.activity(), row.cell.window);
      prefix.extend_to(n0);
      row.prefix_digest = log_hash(prefix.log().events, n0);
    } catch (const CoalescenceFailure& e) {
      row.events = e.events();
      row.doublings = e.doublings();
      row.error = e.what();
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::make_tuple(detail::cell_key(a.cell), a.rep) < std::make_tuple(detail::cell_key(b.cell), b.rep);
  });
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "beta1,beta2,R,pswap,rep,seed,events,doublings,coalesced,wall_ms\n";
  for (const auto& r : rows) {
    out << detail::format_double(r.cell.beta1) << ',' << detail::format_double(r.cell.beta2) << ','
        << detail::format_double(r.cell.radius) << ',' << detail::format_double(r.cell.p_swap) << ',' << r.rep << ','
        << r.seed << ',' << r.events << ',' << r.doublings << ',' << (r.coalesced ? 1 : 0) << ','
        << detail::format_double(std::round(r.wall_ms * 1000.0) / 1000.0) << '\n';
  }
  return out.str();
}

struct CellSummary {
  GridCell cell;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_events = 0.0;
  double se_events = 0.0;
  std::vector<double> events;  // successful runs, in replication order
};

inline std::vector<CellSummary> summarize_sweep(const std::vector<SweepRow>& rows) {
  std::vector<CellSummary> out;
  for (const auto& r : rows) {
    if (out.empty() || detail::cell_key(out.back().cell) != detail::cell_key(r.cell)) {
      out.push_back({});
      out.back().cell = r.cell;
    }
    auto& s = out.back();
    ++s.runs;
    if (r.coalesced) {
      s.events.push_back(static_cast<double>(r.events));
    } else {
      ++s.failures;
    }
  }
  for (auto& s : out) {
    if (!s.events.empty()) s.mean_events = stats::mean(s.events);
    if (s.events.size() > 1) s.se_events = stats::standard_error(s.events);
  }
  return out;
}

// mean events without swaps / mean events with swaps, over replications where
// both runs coalesced; requires both cells to exist with equal replication
// counts. Throws if the paired runs did not share their event logs.
struct PairedRatio {
  double beta1 = 0.0, beta2 = 0.0, radius = 0.0;
  double mean_no_swap = 0.0, mean_swap = 0.0, ratio = 0.0;
  std::vector<double> no_swap, swap;
};

inline PairedRatio paired_ratio(const std::vector<SweepRow>& rows, const GridCell& base) {
  std::map<std::size_t, const SweepRow*> without, with;
  for (const auto& r : rows) {
    if (r.cell.beta1 != base.beta1 || r.cell.beta2 != base.beta2 || r.cell.radius != base.radius) continue;
    if (r.cell.p_swap == 0.0) without[r.rep] = &r;
    if (r.cell.p_swap == 1.0) with[r.rep] = &r;
  }
  PairedRatio pr{base.beta1, base.beta2, base.radius};
  for (const auto& [rep, a] : without) {
    auto it = with.find(rep);
    if (it == with.end()) continue;
    const SweepRow* b = it->second;
    if (a->seed != b->seed || a->prefix_digest != b->prefix_digest) {
      throw std::logic_error("paired runs did not consume the same event log");
    }
    if (!a->coalesced || !b->coalesced) continue;
    pr.no_swap.push_back(static_cast<double>(a->events));
    pr.swap.push_back(static_cast<double>(b->events));
  }
  if (pr.no_swap.empty()) throw std::invalid_argument("no paired replications for the requested cell");
  pr.mean_no_swap = stats::mean(pr.no_swap);
  pr.mean_swap = stats::mean(pr.swap);
  pr.ratio = pr.mean_no_swap / pr.mean_swap;
  return pr;
}

struct BoundCheckRow {
  std::size_t n_events = 0;
  std::size_t replications = 0;
  std::size_t failures = 0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// Empirical P(U_N(0) != L_N(0)) against the coalescence bound, one row per N.
// Every N reuses the same seeds, so by funneling the failure counts are
// nonincreasing in N. p_swap follows the variant (0 or 1/4).
inline std::vector<BoundCheckRow> empirical_vs_bound(double beta1, double beta2, double radius, const Window& window,
                                                     const std::vector<std::size_t>& n_grid, std::size_t replications,
                                                     std::uint64_t base_seed, BoundVariant variant,
                                                     std::size_t threads = default_threads()) {
  const BoundParameters params{beta1, beta2, ball_area(radius, window), window.volume()};
  if (!in_regime(params, variant)) {
    throw std::domain_error("parameters are outside the regime of the coalescence bound");
  }
  const StraussModel model(beta1, beta2, radius);
  const double p_swap = variant == BoundVariant::no_swap ? 0.0 : 0.25;
  const std::size_t n_max = n_grid.empty() ? 0 : *std::max_element(n_grid.begin(), n_grid.end());
  std::vector<std::vector<char>> failed(replications, std::vector<char>(n_grid.size(), 0));
  detail::parallel_for(replications, threads, [&](std::size_t rep) {
    BackwardDominating process(window, model.activity(), derive_seed(base_seed, rep));
    process.extend_to(n_max);
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
      const auto n = n_grid[g];
      const auto chain = replay(model, window, process.log(), process.state_at_depth(n), n, p_swap,
                                [](const Event&, const BoundingChain<StraussModel>&) {});
      failed[rep][g] = !chain.coalesced();
    }
  });
  std::vector<BoundCheckRow> out;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    BoundCheckRow row;
    row.n_events = n_grid[g];
    row.replications = replications;
    for (std::size_t rep = 0; rep < replications; ++rep) row.failures += failed[rep][g];
    row.empirical = static_cast<double>(row.failures) / static_cast<double>(replications);
    row.standard_error = std::sqrt(row.empirical * (1.0 - row.empirical) / static_cast<double>(replications));
    row.bound = theorem_bound(static_cast<double>(row.n_events), params, variant);
    row.pass = row.empirical <= row.bound + 3.0 * row.standard_error;
    out.push_back(row);
  }
  return out;
}

}  // namespace bdswap
