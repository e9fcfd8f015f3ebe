#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "bdswap/chain.hpp"
#include "bdswap/stats.hpp"
#include "bdswap/validation.hpp"

namespace bdswap {
namespace {

const Window kUnit;

Point at(PointId id, double x, double y) { return Point{id, {x, y, 0.0}}; }

Event birth(PointId id, double x, double y, double mark, double swap_uniform = 0.5) {
  Event e;
  e.kind = EventKind::birth;
  e.point = at(id, x, y);
  e.mark = mark;
  e.swap_uniform = swap_uniform;
  return e;
}

Event death(const Point& p) {
  Event e;
  e.kind = EventKind::death;
  e.point = p;
  return e;
}

struct Fixture {
  Configuration d{kUnit, 0.1};
  Configuration x{kUnit, 0.1};
  void both(const Point& p) {
    d.insert(p);
    x.insert(p);
  }
};

TEST(ApplyEvent, DeathRemovesPoint) {
  const StraussModel m(100, 0.5, 0.1);
  Fixture f;
  f.both(at(1, 0.2, 0.2));
  f.both(at(2, 0.7, 0.7));
  apply_event(m, f.d, f.x, death(at(1, 0.2, 0.2)), 1.0, kUnit);
  EXPECT_EQ(f.x.ids(), (std::vector<PointId>{2}));
  EXPECT_EQ(f.d.ids(), (std::vector<PointId>{2}));
}

TEST(ApplyEvent, UnblockedBirthAlwaysAccepted) {
  const StraussModel hard(100, 0.0, 0.1);
  for (double mark : {0.0, 0.5, 0.999999}) {
    Fixture f;
    f.both(at(1, 0.8, 0.8));
    apply_event(hard, f.d, f.x, birth(5, 0.2, 0.2, mark), 0.0, kUnit);
    EXPECT_TRUE(f.x.contains(5));
  }
}

TEST(ApplyEvent, HardCoreSingleBlockerSwaps) {
  const StraussModel hard(100, 0.0, 0.1);
  Fixture f;
  f.both(at(1, 0.5, 0.5));
  apply_event(hard, f.d, f.x, birth(5, 0.55, 0.5, 0.3, 0.0), 1.0, kUnit);
  EXPECT_EQ(f.x.ids(), (std::vector<PointId>{5}));
  EXPECT_EQ(f.d.ids(), (std::vector<PointId>{1, 5}));
}

TEST(ApplyEvent, NoSwapLeavesBlockedBirthOut) {
  const StraussModel hard(100, 0.0, 0.1);
  Fixture f;
  f.both(at(1, 0.5, 0.5));
  apply_event(hard, f.d, f.x, birth(5, 0.55, 0.5, 0.3, 0.0), 0.0, kUnit);
  EXPECT_EQ(f.x.ids(), (std::vector<PointId>{1}));
}

TEST(ApplyEvent, TwoSurvivingBlockersPreventSwap) {
  const StraussModel hard(100, 0.0, 0.1);
  Fixture f;
  f.both(at(1, 0.5, 0.5));
  f.both(at(2, 0.6, 0.5));
  apply_event(hard, f.d, f.x, birth(5, 0.55, 0.5, 0.3, 0.0), 1.0, kUnit);
  EXPECT_EQ(f.x.ids(), (std::vector<PointId>{1, 2}));
}

TEST(ApplyEvent, RejectsEventsInconsistentWithDominating) {
  const StraussModel m(100, 0.5, 0.1);
  Fixture f;
  f.both(at(1, 0.5, 0.5));
  EXPECT_THROW(apply_event(m, f.d, f.x, death(at(7, 0.1, 0.1)), 1.0, kUnit), std::invalid_argument);
  EXPECT_THROW(apply_event(m, f.d, f.x, birth(1, 0.1, 0.1, 0.5), 1.0, kUnit), std::invalid_argument);
}

TEST(TestBlockers, MarkRecycling) {
  // Two blockers at beta2 = 0.5: M = 0.2 passes the first (M -> 0.4), then
  // passes the second (M -> 0.8).
  const StraussModel m(100, 0.5, 0.1);
  Configuration x(kUnit, 0.1);
  x.insert(at(1, 0.5, 0.5));
  x.insert(at(2, 0.52, 0.5));
  const std::vector<PointId> ids{1, 2};
  auto out = test_blockers(m, x, ids, at(9, 0.51, 0.5), 0.2, kUnit);
  EXPECT_FALSE(out[0].blocks);
  EXPECT_FALSE(out[1].blocks);
  // M = 0.3: passes first (0.6), then blocks at the second.
  out = test_blockers(m, x, ids, at(9, 0.51, 0.5), 0.3, kUnit);
  EXPECT_FALSE(out[0].blocks);
  EXPECT_TRUE(out[1].blocks);
  // M = 0.9: blocks first ((1-0.9)/0.5 = 0.2), passes the second.
  out = test_blockers(m, x, ids, at(9, 0.51, 0.5), 0.9, kUnit);
  EXPECT_TRUE(out[0].blocks);
  EXPECT_FALSE(out[1].blocks);
}

// Joint outcomes for two blockers from one uniform mark are independent
// Bernoulli(phi) draws.
TEST(TestBlockers, JointOutcomesAreIndependentBernoulli) {
  const SmoothPairwiseModel m(100, 0.9, 0.2);
  Configuration x(kUnit, 0.2);
  const Point v = at(9, 0.5, 0.5);
  x.insert(at(1, 0.55, 0.5));
  x.insert(at(2, 0.5, 0.62));
  const double phi1 = interaction(m, v, *x.find(1), kUnit);
  const double phi2 = interaction(m, v, *x.find(2), kUnit);
  ASSERT_LT(phi1, 1.0);
  ASSERT_LT(phi2, 1.0);
  RandomStream s(4, StreamPurpose::test);
  std::array<double, 4> counts{};
  const int n = 200000;
  const std::vector<PointId> ids{1, 2};
  for (int i = 0; i < n; ++i) {
    const auto out = test_blockers(m, x, ids, v, s.uniform(), kUnit);
    ++counts[2 * out[0].blocks + out[1].blocks];
  }
  const std::array<double, 4> probs{phi1 * phi2, phi1 * (1 - phi2), (1 - phi1) * phi2, (1 - phi1) * (1 - phi2)};
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) chi2 += std::pow(counts[k] - n * probs[k], 2) / (n * probs[k]);
  EXPECT_GT(stats::chi_square_sf(chi2, 3), 1e-3);
}

TEST(RunChain, NoInteractionTracksDominating) {
  const StraussModel m(30, 1.0, 0.1);
  IdCounter ids;
  const Configuration d0 = start_dominating(kUnit, 30, 6, ids);
  auto [end, log] = simulate_forward(d0, 2000, 30, kUnit, 6, ids);
  run_chain(m, d0, log, 1.0, kUnit, [](const Event&, const Configuration& d, const Configuration& x) {
    ASSERT_EQ(d, x);
  });
}

TEST(RunChain, NoSwapAcceptanceIsBeta2PowerN) {
  // Fixed X with two points near the birth site; acceptance probability of a
  // birth there is beta2^2 = 0.25 without swaps and 0.25 + 2 * 0.25 with swaps.
  const StraussModel m(100, 0.5, 0.1);
  RandomStream s(21, StreamPurpose::test);
  const int n = 40000;
  int accepted_no_swap = 0, accepted_swap = 0;
  for (int i = 0; i < n; ++i) {
    Fixture f;
    f.both(at(1, 0.5, 0.5));
    f.both(at(2, 0.52, 0.5));
    Fixture g = f;
    const Event e = birth(5, 0.51, 0.5, s.uniform(), s.uniform());
    apply_event(m, f.d, f.x, e, 0.0, kUnit);
    apply_event(m, g.d, g.x, e, 1.0, kUnit);
    accepted_no_swap += f.x.contains(5);
    accepted_swap += g.x.contains(5);
  }
  EXPECT_NEAR(accepted_no_swap / double(n), 0.25, 3 * std::sqrt(0.25 * 0.75 / n));
  EXPECT_NEAR(accepted_swap / double(n), 0.75, 3 * std::sqrt(0.25 * 0.75 / n));
}

TEST(RunChain, DominationHolds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const StraussModel m(60, 0.3, 0.1);
    IdCounter ids;
    const Configuration d0 = start_dominating(kUnit, 60, seed, ids);
    auto [end, log] = simulate_forward(d0, 500, 60, kUnit, seed, ids);
    run_chain(m, Configuration{}, log, seed % 2 ? 1.0 : 0.0, kUnit,
              [](const Event&, const Configuration& d, const Configuration& x) {
                for (const auto& p : x) ASSERT_TRUE(d.contains(p.id));
              });
  }
}

// Long-run averages of #X and s(X), sampled at unit time spacing, agree with
// the rejection oracle.
TEST(RunChain, EquilibriumMatchesOracle) {
  const StraussModel m(20, 0.5, 0.1);
  for (double p_swap : {0.0, 1.0}) {
    IdCounter ids;
    const Configuration d0 = start_dominating(kUnit, 20, 8, ids);
    auto [end, log] = simulate_forward(d0, 400000, 20, kUnit, 8, ids);
    std::vector<double> counts, pairs;
    double next_sample = 50.0;  // burn-in
    Configuration last;
    run_chain(m, Configuration{}, log, p_swap, kUnit, [&](const Event& e, const Configuration&, const Configuration& x) {
      while (*e.time > next_sample) {
        // last is the state on [previous event, e.time)
        const auto s = summarize(last, m.range(), kUnit);
        counts.push_back(double(s.count));
        pairs.push_back(double(s.pairs));
        next_sample += 1.0;
      }
      last = x;
    });
    auto batch_se = [](const std::vector<double>& xs) {
      const std::size_t b = 50, per = xs.size() / b;
      std::vector<double> means;
      for (std::size_t i = 0; i < b; ++i) {
        means.push_back(stats::mean(std::span<const double>(xs.data() + i * per, per)));
      }
      return stats::standard_error(means);
    };
    std::vector<double> oc, op;
    RandomStream s(9, StreamPurpose::oracle);
    for (int i = 0; i < 5000; ++i) {
      const auto o = summarize(rejection_oracle(m, kUnit, s).sample, m.range(), kUnit);
      oc.push_back(double(o.count));
      op.push_back(double(o.pairs));
    }
    const double se_count = std::hypot(batch_se(counts), stats::standard_error(oc));
    const double se_pairs = std::hypot(batch_se(pairs), stats::standard_error(op));
    EXPECT_NEAR(stats::mean(counts), stats::mean(oc), 3 * se_count) << "p_swap " << p_swap;
    EXPECT_NEAR(stats::mean(pairs), stats::mean(op), 3 * se_pairs) << "p_swap " << p_swap;
  }
}

TEST(Trajectory, JsonLines) {
  Configuration x;
  x.insert(at(4, 0.1, 0.1));
  x.insert(at(2, 0.2, 0.1));
  std::ostringstream out;
  write_trajectory_line(out, 7, x);
  EXPECT_EQ(out.str(), "{\"index\":7,\"size\":2,\"ids\":[2,4]}\n");
}

}  // namespace
}  // namespace bdswap
