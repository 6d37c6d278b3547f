#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rvwalk/errors.hpp"

namespace rvwalk {

struct Ci {
  double lo;
  double hi;
};

// Wilson score interval: well behaved at zero or tiny event counts, where the
// Wald interval collapses.
inline Ci wilson_ci95(std::int64_t events, std::int64_t reps) {
  require(reps > 0 && events >= 0 && events <= reps, Errc::invalid_argument,
          "wilson_ci95 needs 0 <= events <= reps");
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(reps);
  const double p = static_cast<double>(events) / n;
  const double z2n = z * z / n;
  const double denom = 1.0 + z2n;
  const double center = (p + 0.5 * z2n) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n) / denom;
  Ci ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (events == 0) ci.lo = 0.0;  // degenerate [0, upper]
  if (events == reps) ci.hi = 1.0;
  return ci;
}

// One Monte Carlo comparison against the limit theory. The interval is the Wilson
// 95% interval on event_count/replications scaled by the same deterministic
// normalizer as the estimate.
struct EstimateResult {
  double estimate = 0.0;
  std::int64_t replications = 0;
  Ci ci95{0.0, 0.0};
  std::int64_t event_count = 0;
  double truncation_bound = 0.0;  // 0 unless a horizon was applied
  std::optional<double> theory_value;

  bool zero_events() const { return event_count == 0; }
};

inline EstimateResult make_ratio_estimate(std::int64_t events, std::int64_t reps,
                                          double normalizer,
                                          std::optional<double> theory = std::nullopt,
                                          double truncation_bound = 0.0) {
  EstimateResult r;
  r.replications = reps;
  r.event_count = events;
  r.estimate = normalizer * static_cast<double>(events) / static_cast<double>(reps);
  const Ci ci = wilson_ci95(events, reps);
  r.ci95 = {normalizer * ci.lo, normalizer * ci.hi};
  r.theory_value = theory;
  r.truncation_bound = truncation_bound;
  return r;
}

// Kolmogorov–Smirnov distance between the empirical law of a sample and a cdf.
template <class Cdf>
inline double ks_distance(std::vector<double> sample, Cdf cdf) {
  require(!sample.empty(), Errc::invalid_argument, "ks_distance needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace rvwalk
