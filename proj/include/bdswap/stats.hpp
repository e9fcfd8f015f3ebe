#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace bdswap::stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs at least two values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

inline double standard_error(std::span<const double> xs) {
  return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

inline double chi_square_sf(double statistic, double df) {
  if (df <= 0.0) throw std::invalid_argument("chi-square needs positive degrees of freedom");
  if (statistic <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), statistic));
}

inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }
inline double normal_upper_p(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Kolmogorov-Smirnov test of xs against Uniform(0, 1), asymptotic p-value
// with Stephens' small-sample correction.
inline TestResult ks_uniform(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("KS test of empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::clamp(xs[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return {d, 0.0, std::clamp(p, 0.0, 1.0)};
}

// Merges adjacent bins (in key order) until each holds an expected count of at
// least min_expected; the remainder is folded into the last bin.
inline std::vector<std::pair<double, double>> pool_bins(const std::vector<std::pair<double, double>>& observed_expected,
                                                        double min_expected = 5.0) {
  std::vector<std::pair<double, double>> pooled;
  double obs = 0.0, expd = 0.0;
  for (const auto& [o, e] : observed_expected) {
    obs += o;
    expd += e;
    if (expd >= min_expected) {
      pooled.emplace_back(obs, expd);
      obs = expd = 0.0;
    }
  }
  if (expd > 0.0 || obs > 0.0) {
    if (pooled.empty()) {
      pooled.emplace_back(obs, expd);
    } else {
      pooled.back().first += obs;
      pooled.back().second += expd;
    }
  }
  return pooled;
}

// Chi-square goodness of fit of integer counts to Poisson(mean).
inline TestResult poisson_goodness_of_fit(std::span<const std::uint64_t> counts, double poisson_mean) {
  if (counts.empty()) throw std::invalid_argument("goodness of fit on empty sample");
  const double n = static_cast<double>(counts.size());
  std::map<std::uint64_t, double> hist;
  std::uint64_t top = 0;
  for (auto c : counts) {
    hist[c] += 1.0;
    top = std::max(top, c);
  }
  const std::uint64_t kmax = std::max<std::uint64_t>(top, static_cast<std::uint64_t>(poisson_mean * 3 + 10));
  std::vector<std::pair<double, double>> bins;
  double log_pmf = -poisson_mean;  // k = 0
  double cumulative = 0.0;
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    if (k > 0) log_pmf += std::log(poisson_mean) - std::log(static_cast<double>(k));
    double pk = std::exp(log_pmf);
    cumulative += pk;
    if (k == kmax) pk += std::max(0.0, 1.0 - cumulative);  // upper tail
    bins.emplace_back(hist.contains(k) ? hist[k] : 0.0, n * pk);
  }
  const auto pooled = pool_bins(bins);
  if (pooled.size() < 2) throw std::invalid_argument("degenerate binning");
  double stat = 0.0;
  for (const auto& [o, e] : pooled) stat += (o - e) * (o - e) / e;
  const double df = static_cast<double>(pooled.size() - 1);
  return {stat, df, chi_square_sf(stat, df)};
}

// Two-sample chi-square homogeneity test on integer-valued samples, bins
// pooled so each has a combined count of at least min_count.
inline TestResult two_sample_chi_square(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                        double min_count = 10.0) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two-sample test on empty sample");
  std::map<std::uint64_t, std::pair<double, double>> hist;
  for (auto x : a) hist[x].first += 1.0;
  for (auto x : b) hist[x].second += 1.0;
  std::vector<std::pair<double, double>> pooled;
  double ca = 0.0, cb = 0.0;
  for (const auto& [k, ab] : hist) {
    ca += ab.first;
    cb += ab.second;
    if (ca + cb >= min_count) {
      pooled.emplace_back(ca, cb);
      ca = cb = 0.0;
    }
  }
  if (ca + cb > 0.0) {
    if (pooled.empty()) {
      pooled.emplace_back(ca, cb);
    } else {
      pooled.back().first += ca;
      pooled.back().second += cb;
    }
  }
  if (pooled.size() < 2) return {0.0, 0.0, 1.0};
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double total = na + nb;
  double stat = 0.0;
  for (const auto& [oa, ob] : pooled) {
    const double row = oa + ob;
    const double ea = row * na / total, eb = row * nb / total;
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  const double df = static_cast<double>(pooled.size() - 1);
  return {stat, df, chi_square_sf(stat, df)};
}

// Welch z-test for equal means (large samples).
inline TestResult two_sample_mean_z(std::span<const double> a, std::span<const double> b) {
  const double se = std::sqrt(variance(a) / static_cast<double>(a.size()) + variance(b) / static_cast<double>(b.size()));
  const double diff = mean(a) - mean(b);
  if (se == 0.0) return {0.0, 0.0, diff == 0.0 ? 1.0 : 0.0};
  const double z = diff / se;
  return {z, 0.0, normal_two_sided_p(z)};
}

// Brown-Forsythe test for equal spread: z-test on absolute deviations from
// each sample's median.
inline TestResult two_sample_spread_z(std::span<const double> a, std::span<const double> b) {
  auto deviations = [](std::span<const double> xs) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double med = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::vector<double> dev;
    dev.reserve(n);
    for (double x : xs) dev.push_back(std::abs(x - med));
    return dev;
  };
  const auto da = deviations(a);
  const auto db = deviations(b);
  return two_sample_mean_z(da, db);
}

// One-sided paired t-style test (normal approximation) that mean(a - b) > 0.
inline TestResult paired_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("paired test needs equal-length samples");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double se = standard_error(diff);
  const double m = mean(diff);
  if (se == 0.0) return {0.0, 0.0, m > 0.0 ? 0.0 : 1.0};
  const double z = m / se;
  return {z, static_cast<double>(a.size() - 1), normal_upper_p(z)};
}

}  // namespace bdswap::stats
