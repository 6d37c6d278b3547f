#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rvwalk/measure.hpp"
#include "rvwalk/model.hpp"
#include "rvwalk/parallel.hpp"
#include "rvwalk/rng.hpp"
#include "rvwalk/sample.hpp"
#include "rvwalk/sets.hpp"
#include "rvwalk/stats.hpp"

namespace rvwalk {

namespace detail {

inline void check_reps(std::int64_t n, std::int64_t reps) {
  require(n >= 1, Errc::invalid_argument, "n must be >= 1");
  require(reps >= 1, Errc::invalid_argument, "replication count must be >= 1");
}

inline std::vector<std::int64_t> sum_worker_counts(const std::vector<std::vector<std::int64_t>>& per_worker) {
  std::vector<std::int64_t> total(per_worker.front().size(), 0);
  for (const auto& w : per_worker)
    for (std::size_t i = 0; i < w.size(); ++i) total[i] += w[i];
  return total;
}

}  // namespace detail

// Partial-sum large-deviation ratio: gamma_n * P(S_{[nt]} / lambda_n in A) against
// the limit t*mu(A).
inline EstimateResult ldp_ratio(const RegVarModel& model, const ScalingSchedule& schedule,
                                const StarSet& set, double t, std::int64_t n, std::int64_t reps,
                                std::uint64_t seed, int threads = 0) {
  detail::check_reps(n, reps);
  require(t > 0.0 && t <= 1.0, Errc::invalid_argument, "ldp_ratio requires t in (0,1]");
  validate_schedule(model, schedule);
  const double lam = lambda_n(schedule, n);
  const double g = gamma_n(model, schedule, n);
  const double theory = t * mu(model, set).value;

  const auto index = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t));
  const int workers = resolve_threads(threads);
  std::vector<std::vector<std::int64_t>> counts(workers, std::vector<std::int64_t>(1, 0));
  const std::size_t d = model.dimension();

  parallel_for(reps, workers, [&](int w, std::int64_t rep) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(rep));
    Vec z(d), s(d, 0.0), p(d);
    for (std::int64_t k = 0; k < index; ++k) {
      draw_step(model, rng, z);
      add_scaled(s, 1.0, z);
    }
    for (std::size_t i = 0; i < d; ++i) p[i] = s[i] / lam;
    if (set.contains(p)) ++counts[static_cast<std::size_t>(w)][0];
  });

  const std::int64_t events = detail::sum_worker_counts(counts)[0];
  return make_ratio_estimate(events, reps, g, theory);
}

// Finite-dimensional ratio: gamma_n * P(S_{[n t_i]} / lambda_n in A_i for every i),
// against the restriction m_{t_1..t_k}(A_1 x ... x A_k).
inline EstimateResult fidi_ratio(const RegVarModel& model, const ScalingSchedule& schedule,
                                 const std::vector<double>& times,
                                 const std::vector<StarSet>& sets, std::int64_t n,
                                 std::int64_t reps, std::uint64_t seed, int threads = 0) {
  detail::check_reps(n, reps);
  validate_schedule(model, schedule);
  const double lam = lambda_n(schedule, n);
  const double g = gamma_n(model, schedule, n);
  const double theory = m_fidi(model, times, sets).value;

  std::vector<std::int64_t> checkpoints;
  checkpoints.reserve(times.size());
  for (double t : times)
    checkpoints.push_back(static_cast<std::int64_t>(std::floor(static_cast<double>(n) * t)));

  const int workers = resolve_threads(threads);
  std::vector<std::vector<std::int64_t>> counts(workers, std::vector<std::int64_t>(1, 0));
  const std::size_t d = model.dimension();

  parallel_for(reps, workers, [&](int w, std::int64_t rep) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(rep));
    Vec z(d), s(d, 0.0), p(d);
    std::int64_t k = 0;
    for (std::size_t ci = 0; ci < checkpoints.size(); ++ci) {
      for (; k < checkpoints[ci]; ++k) {
        draw_step(model, rng, z);
        add_scaled(s, 1.0, z);
      }
      for (std::size_t i = 0; i < d; ++i) p[i] = s[i] / lam;
      if (!sets[ci].contains(p)) return;
    }
    ++counts[static_cast<std::size_t>(w)][0];
  });

  const std::int64_t events = detail::sum_worker_counts(counts)[0];
  return make_ratio_estimate(events, reps, g, theory);
}

namespace detail {

// Covering constant for the certified horizon truncation term kappa * M^{1-alpha}.
// A half-space target is covered by itself; otherwise the cone-aperture bound
// theta = |c| delta / 2 is used.
inline double ruin_truncation_kappa(const RegVarModel& model, const StarSet& set, const Vec& c) {
  const double alpha = model.alpha();
  if (auto hs = set.as_half_space()) {
    const double cd = dot(c, hs->first);
    require(cd > 0.0, Errc::cone_violation, "half-space opposes the drift");
    return std::pow(cd, -alpha) / (alpha - 1.0);
  }
  const double delta = set.cone_delta(c);
  require(delta > 0.0, Errc::cone_violation, "no positive cone aperture for this target");
  const double theta = 0.5 * norm(c) * delta;
  return std::pow(theta, -alpha) / (alpha - 1.0);
}

}  // namespace detail

// Ruin ratio: P(S_k - c k in uA for some k <= ceil(u M)) / (u P(|Z| > u)), against
// mu*(A). The normalizer uses the analytic pre-centering tail u^{-alpha}; the horizon
// loss is reported as the certified bound kappa * M^{1-alpha}, a formula, not an
// estimate, so it scales exactly by 2^{1-alpha} when M doubles.
inline EstimateResult ruin_ratio(const RegVarModel& model, const StarSet& set, const Vec& c,
                                 double u, double horizon_M, std::int64_t reps,
                                 std::uint64_t seed, int threads = 0, double quad_tol = 1e-9) {
  require(reps >= 1, Errc::invalid_argument, "replication count must be >= 1");
  require(u > 0.0, Errc::invalid_argument, "ruin level u must be positive");
  require(horizon_M > 1.0, Errc::horizon_too_small, "horizon multiple M must exceed 1");
  require(model.alpha() > 1.0, Errc::invalid_argument, "ruin asymptotics require alpha > 1");
  require(model.is_mean_zero(), Errc::invalid_argument, "ruin asymptotics require E(Z) = 0");

  const double theory = mu_star(model, set, c, quad_tol).value;
  const double kappa = detail::ruin_truncation_kappa(model, set, c);
  const double trunc = kappa * std::pow(horizon_M, 1.0 - model.alpha());

  const auto horizon = static_cast<std::int64_t>(std::ceil(u * horizon_M));
  const int workers = resolve_threads(threads);
  std::vector<std::vector<std::int64_t>> counts(workers, std::vector<std::int64_t>(1, 0));
  const std::size_t d = model.dimension();

  parallel_for(reps, workers, [&](int w, std::int64_t rep) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(rep));
    Vec z(d), drifted(d, 0.0), p(d);
    for (std::int64_t k = 1; k <= horizon; ++k) {
      draw_step(model, rng, z);
      for (std::size_t i = 0; i < d; ++i) drifted[i] += z[i] - c[i];
      for (std::size_t i = 0; i < d; ++i) p[i] = drifted[i] / u;
      if (set.contains(p)) {
        ++counts[static_cast<std::size_t>(w)][0];
        return;
      }
    }
  });

  const std::int64_t events = detail::sum_worker_counts(counts)[0];
  const double normalizer = 1.0 / (u * std::pow(u, -model.alpha()));
  return make_ratio_estimate(events, reps, normalizer, theory, trunc);
}

// Block maxima cdf at each grid point x: P(componentwise maxima of block sums
// <= a_n x) against exp(-mu(([0,x])^c)). Degenerate directions (an atom with a
// negative component) push mu to infinity and the limit to zero.
inline std::vector<EstimateResult> maxima_cdf(const RegVarModel& model, std::int64_t n,
                                              std::int64_t block_r, std::int64_t reps,
                                              std::uint64_t seed, const std::vector<Vec>& grid,
                                              int threads = 0) {
  detail::check_reps(n, reps);
  require(block_r >= 1 && block_r <= n, Errc::invalid_argument,
          "block length must lie in [1, n]");
  require(!grid.empty(), Errc::invalid_argument, "maxima grid must be nonempty");
  const std::size_t d = model.dimension();
  for (const Vec& x : grid) {
    require(x.size() == d, Errc::invalid_argument, "grid point dimension mismatch");
    for (double v : x)
      require(v > 0.0, Errc::invalid_argument,
              "grid points must be strictly positive (A_x must stay clear of 0)");
  }

  const double a = a_n(model, ScalingSchedule{}, n).value;
  const auto blocks = n / block_r;
  const int workers = resolve_threads(threads);
  std::vector<std::vector<std::int64_t>> counts(workers,
                                                std::vector<std::int64_t>(grid.size(), 0));

  parallel_for(reps, workers, [&](int w, std::int64_t rep) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(rep));
    Vec z(d), acc(d), maxima(d, -kInf);
    for (std::int64_t b = 0; b < blocks; ++b) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::int64_t k = 0; k < block_r; ++k) {
        draw_step(model, rng, z);
        add_scaled(acc, 1.0, z);
      }
      for (std::size_t i = 0; i < d; ++i) maxima[i] = std::max(maxima[i], acc[i]);
    }
    auto& mine = counts[static_cast<std::size_t>(w)];
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      bool below = true;
      for (std::size_t i = 0; i < d && below; ++i) below = maxima[i] <= a * grid[gi][i];
      if (below) ++mine[gi];
    }
  });

  const std::vector<std::int64_t> events = detail::sum_worker_counts(counts);
  std::vector<EstimateResult> out;
  out.reserve(grid.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double m = mu_or_infinity(model, StarSet::box_complement(grid[gi]));
    const double theory = std::isfinite(m) ? std::exp(-m) : 0.0;
    out.push_back(make_ratio_estimate(events[gi], reps, 1.0, theory));
  }
  return out;
}

// Support diagnostic for the one-jump limit: among paths with S_n in nA, the fraction
// whose largest single step carries at least `threshold` of |S_n|. The threshold is an
// engineering knob; the limit statement itself fixes no finite-n recipe.
inline EstimateResult one_jump_diagnostic(const RegVarModel& model, const StarSet& set,
                                          std::int64_t n, std::int64_t reps, std::uint64_t seed,
                                          double threshold = 0.8, int threads = 0) {
  detail::check_reps(n, reps);
  require(threshold > 0.0 && threshold <= 1.0, Errc::invalid_argument,
          "jump threshold must lie in (0,1]");
  require(model.alpha() > 1.0 && model.is_mean_zero(), Errc::invalid_argument,
          "the diagnostic applies to mean-zero models with alpha > 1");
  mu(model, set);  // rejects sets that are not bounded away from 0

  const int workers = resolve_threads(threads);
  std::vector<std::vector<std::int64_t>> counts(workers, std::vector<std::int64_t>(2, 0));
  const std::size_t d = model.dimension();

  parallel_for(reps, workers, [&](int w, std::int64_t rep) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(rep));
    Vec z(d), s(d, 0.0), p(d);
    double max_step = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
      draw_step(model, rng, z);
      max_step = std::max(max_step, norm(z));
      add_scaled(s, 1.0, z);
    }
    for (std::size_t i = 0; i < d; ++i) p[i] = s[i] / static_cast<double>(n);
    if (!set.contains(p)) return;
    auto& mine = counts[static_cast<std::size_t>(w)];
    ++mine[0];
    if (max_step >= threshold * norm(s)) ++mine[1];
  });

  const auto totals = detail::sum_worker_counts(counts);
  EstimateResult r;
  r.replications = reps;
  r.event_count = totals[0];
  if (totals[0] == 0) return r;  // undefined diagnostic; caller warns
  r.estimate = static_cast<double>(totals[1]) / static_cast<double>(totals[0]);
  r.ci95 = wilson_ci95(totals[1], totals[0]);
  return r;
}

}  // namespace rvwalk
