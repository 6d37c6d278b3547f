#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rvwalk/estimate.hpp"
#include "rvwalk/measure.hpp"
#include "rvwalk/model.hpp"
#include "rvwalk/parallel.hpp"
#include "rvwalk/sample.hpp"
#include "rvwalk/sets.hpp"
#include "rvwalk/stats.hpp"

namespace rvwalk {

// R_n(A) = sup{k : S_{i+k} - S_i in kA for some i}, sup of the empty set taken as 0.
// When length > 0, (S_{start+length} - S_start) lies in length*A and start is the
// smallest index achieving the maximal length.
struct SegmentResult {
  std::size_t length = 0;
  std::size_t start = 0;  // meaningful only when length > 0
};

namespace detail {

// Half-space fast path: with P_m = (S_m, d) - m a, a window (i, i+k] lies in kA
// exactly when P_{i+k} >= P_i, so R_n is the widest ramp i < m with P_m >= P_i.
inline SegmentResult longest_ramp(const std::vector<double>& prefix) {
  const std::size_t n = prefix.size() - 1;
  std::vector<std::size_t> minima;  // indices with strictly decreasing prefix value
  for (std::size_t i = 0; i <= n; ++i)
    if (minima.empty() || prefix[i] < prefix[minima.back()]) minima.push_back(i);

  std::size_t best = 0;
  for (std::size_t m = n + 1; m-- > 0;) {
    while (!minima.empty() && prefix[minima.back()] <= prefix[m]) {
      best = std::max(best, m - minima.back());
      minima.pop_back();
    }
    if (minima.empty()) break;
  }
  if (best == 0) return {};
  for (std::size_t i = 0; i + best <= n; ++i)
    if (prefix[i + best] >= prefix[i]) return {best, i};
  return {};  // unreachable
}

inline SegmentResult longest_segment_half_space(const std::vector<Vec>& sums, const Vec& d,
                                                double a) {
  std::vector<double> prefix(sums.size());
  for (std::size_t m = 0; m < sums.size(); ++m)
    prefix[m] = dot(sums[m], d) - static_cast<double>(m) * a;
  return longest_ramp(prefix);
}

inline SegmentResult longest_segment_general(const std::vector<Vec>& sums, const StarSet& set) {
  const std::size_t n = sums.size() - 1;
  if (n == 0) return {};
  const std::size_t d = sums.front().size();
  Vec avg(d);
  // k descends so the first witness ends the search; i ascends for the smallest start
  for (std::size_t k = n; k >= 1; --k) {
    for (std::size_t i = 0; i + k <= n; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        avg[j] = (sums[i + k][j] - sums[i][j]) / static_cast<double>(k);
      if (set.contains(avg)) return {k, i};
    }
  }
  return {};
}

}  // namespace detail

// Exhaustive reference: O(n^2) membership tests, no shape assumptions.
inline SegmentResult longest_segment_naive(const WalkPath& path, const StarSet& set) {
  return detail::longest_segment_general(path.sums, set);
}

inline SegmentResult longest_segment(const WalkPath& path, const StarSet& set) {
  if (path.sums.size() <= 1) return {};
  if (auto hs = set.as_half_space())
    return detail::longest_segment_half_space(path.sums, hs->first, hs->second);
  return detail::longest_segment_general(path.sums, set);
}

// Large-deviation ratio for long strange segments:
//   P(R_n(A) > n t) / (n P(|Z| > n)) against mu(A*(t)).
inline EstimateResult segment_ld_ratio(const RegVarModel& model, const StarSet& set, double t,
                                       std::int64_t n, std::int64_t reps, std::uint64_t seed,
                                       int threads = 0) {
  detail::check_reps(n, reps);
  require(t > 0.0 && t < 1.0, Errc::invalid_argument, "segment_ld_ratio requires t in (0,1)");
  require(model.alpha() > 1.0 && model.is_mean_zero(), Errc::invalid_argument,
          "segment asymptotics require a mean-zero model with alpha > 1");
  const double theory = mu(model, scale_union(set, t, ScaleUnionMode::closed)).value;
  const auto min_len =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) * t)) + 1;  // R_n > nt

  const auto hs = set.as_half_space();
  const int workers = resolve_threads(threads);
  std::vector<std::vector<std::int64_t>> counts(workers, std::vector<std::int64_t>(1, 0));
  const std::size_t d = model.dimension();
  const auto un = static_cast<std::size_t>(n);

  parallel_for(reps, workers, [&](int w, std::int64_t rep) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(rep));
    bool event = false;
    if (hs) {
      std::vector<double> prefix(un + 1, 0.0);
      Vec z(d);
      double s = 0.0;
      for (std::size_t k = 1; k <= un; ++k) {
        draw_step(model, rng, z);
        s += dot(z, hs->first);
        prefix[k] = s - static_cast<double>(k) * hs->second;
      }
      event = detail::longest_ramp(prefix).length >= min_len;
    } else {
      std::vector<Vec> sums(un + 1, Vec(d, 0.0));
      Vec z(d);
      for (std::size_t k = 1; k <= un; ++k) {
        draw_step(model, rng, z);
        sums[k] = sums[k - 1];
        add_scaled(sums[k], 1.0, z);
      }
      Vec avg(d);
      for (std::size_t k = un; k >= min_len && !event; --k) {
        for (std::size_t i = 0; i + k <= un && !event; ++i) {
          for (std::size_t j = 0; j < d; ++j)
            avg[j] = (sums[i + k][j] - sums[i][j]) / static_cast<double>(k);
          event = set.contains(avg);
        }
      }
    }
    if (event) ++counts[static_cast<std::size_t>(w)][0];
  });

  const std::int64_t events = detail::sum_worker_counts(counts)[0];
  const double normalizer = 1.0 / (static_cast<double>(n) * radial_tail(model, static_cast<double>(n)));
  return make_ratio_estimate(events, reps, normalizer, theory);
}

// One segment result per replication, in replication order.
inline std::vector<SegmentResult> segment_frechet_results(const RegVarModel& model,
                                                          const StarSet& set, std::int64_t n,
                                                          std::int64_t reps, std::uint64_t seed,
                                                          int threads = 0) {
  detail::check_reps(n, reps);
  require(model.alpha() > 1.0 && model.is_mean_zero(), Errc::invalid_argument,
          "segment asymptotics require a mean-zero model with alpha > 1");
  const auto hs = set.as_half_space();
  const std::size_t d = model.dimension();
  const auto un = static_cast<std::size_t>(n);
  std::vector<SegmentResult> results(static_cast<std::size_t>(reps));

  parallel_for(reps, threads, [&](int, std::int64_t rep) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(rep));
    if (hs) {
      std::vector<double> prefix(un + 1, 0.0);
      Vec z(d);
      double s = 0.0;
      for (std::size_t k = 1; k <= un; ++k) {
        draw_step(model, rng, z);
        s += dot(z, hs->first);
        prefix[k] = s - static_cast<double>(k) * hs->second;
      }
      results[static_cast<std::size_t>(rep)] = detail::longest_ramp(prefix);
    } else {
      std::vector<Vec> sums(un + 1, Vec(d, 0.0));
      Vec z(d);
      for (std::size_t k = 1; k <= un; ++k) {
        draw_step(model, rng, z);
        sums[k] = sums[k - 1];
        add_scaled(sums[k], 1.0, z);
      }
      results[static_cast<std::size_t>(rep)] = detail::longest_segment_general(sums, set);
    }
  });
  return results;
}

// One scaled segment length a_n^{-1} R_n(A) per replication, in replication order.
inline std::vector<double> segment_frechet_samples(const RegVarModel& model, const StarSet& set,
                                                   std::int64_t n, std::int64_t reps,
                                                   std::uint64_t seed, int threads = 0,
                                                   const ScalingSchedule& schedule = {}) {
  const double a = a_n(model, schedule, n).value;
  const std::vector<SegmentResult> results =
      segment_frechet_results(model, set, n, reps, seed, threads);
  std::vector<double> sample(results.size());
  for (std::size_t i = 0; i < results.size(); ++i)
    sample[i] = static_cast<double>(results[i].length) / a;
  return sample;
}

// Fréchet limit cdf check: P(a_n^{-1} R_n(A) <= x) against exp{-x^{-alpha} v} with
// v the Fréchet scale of A.
inline std::vector<EstimateResult> segment_frechet_cdf(const RegVarModel& model,
                                                       const StarSet& set, std::int64_t n,
                                                       std::int64_t reps, std::uint64_t seed,
                                                       const std::vector<double>& grid,
                                                       int threads = 0,
                                                       const ScalingSchedule& schedule = {}) {
  require(!grid.empty(), Errc::invalid_argument, "cdf grid must be nonempty");
  for (double x : grid)
    require(x > 0.0, Errc::invalid_argument, "cdf grid points must be positive");
  const double v = frechet_scale(model, set).value;
  const std::vector<double> sample =
      segment_frechet_samples(model, set, n, reps, seed, threads, schedule);

  std::vector<EstimateResult> out;
  out.reserve(grid.size());
  for (double x : grid) {
    std::int64_t events = 0;
    for (double s : sample)
      if (s <= x) ++events;
    const double theory = std::exp(-std::pow(x, -model.alpha()) * v);
    out.push_back(make_ratio_estimate(events, reps, 1.0, theory));
  }
  return out;
}

}  // namespace rvwalk
