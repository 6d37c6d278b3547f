#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rvwalk/model.hpp"
#include "rvwalk/rng.hpp"
#include "rvwalk/vec.hpp"

namespace rvwalk {

namespace detail {

// Uniform draw from the closed ball of radius rho by rejection from the cube.
// Symmetric, so the perturbation has mean zero and leaves the centering intact.
template <class Rng>
inline void add_ball_noise(Rng& rng, double rho, std::span<double> out) {
  const std::size_t d = out.size();
  Vec w(d);
  for (;;) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] = (2.0 * rng.uniform01() - 1.0) * rho;
      n2 += w[i] * w[i];
    }
    if (n2 <= rho * rho) break;
  }
  for (std::size_t i = 0; i < d; ++i) out[i] += w[i];
}

}  // namespace detail

// One step Z = R*Theta - centering, R = U^{-1/alpha} by inverse CDF (exact, no
// rejection in the tail), Theta picked from the spectral atoms by weight.
template <class Rng>
inline void draw_step(const RegVarModel& model, Rng& rng, std::span<double> out) {
  const double r = detail::pareto_radius(model.alpha(), rng.uniform01());
  const auto& atoms = model.atoms();
  const std::size_t idx = atoms.size() > 1 ? model.pick_atom(rng.uniform01()) : 0;
  const Vec& dir = atoms[idx].direction;
  const Vec& center = model.centering();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r * dir[i] - center[i];
  if (model.noise_radius() > 0.0) detail::add_ball_noise(rng, model.noise_radius(), out);
}

template <class Rng>
inline Vec draw_step(const RegVarModel& model, Rng& rng) {
  Vec z(model.dimension());
  draw_step(model, rng, z);
  return z;
}

// A realized walk S_0 = 0, S_k = Z_1 + ... + Z_k. The whole path is a pure
// function of (seed, model), bitwise reproducible across runs and thread counts.
struct WalkPath {
  std::vector<Vec> sums;  // S_0 .. S_n
  std::uint64_t seed;

  std::size_t steps() const { return sums.size() - 1; }
};

inline WalkPath walk(const RegVarModel& model, std::size_t n, std::uint64_t seed) {
  WalkPath path;
  path.seed = seed;
  path.sums.reserve(n + 1);
  path.sums.emplace_back(model.dimension(), 0.0);
  SplitMix64 rng(mix64(seed));
  Vec z(model.dimension());
  Vec s(model.dimension(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    draw_step(model, rng, z);
    add_scaled(s, 1.0, z);
    path.sums.push_back(s);
  }
  return path;
}

// The drifted walk S_k - c k.
inline WalkPath drifted_walk(const RegVarModel& model, const Vec& c, std::size_t n,
                             std::uint64_t seed) {
  WalkPath path = walk(model, n, seed);
  for (std::size_t k = 1; k < path.sums.size(); ++k)
    add_scaled(path.sums[k], -static_cast<double>(k), c);
  return path;
}

// Disjoint block sums S_{ir} - S_{(i-1)r}, i = 1..floor(n/r); a trailing partial
// block is discarded.
inline std::vector<Vec> block_sums(const RegVarModel& model, std::size_t n, std::size_t r,
                                   std::uint64_t seed) {
  require(r >= 1, Errc::invalid_argument, "block length must be >= 1");
  std::vector<Vec> blocks;
  if (r > n) return blocks;  // empty output; the caller may warn
  const std::size_t count = n / r;
  blocks.reserve(count);
  SplitMix64 rng(mix64(seed));
  Vec z(model.dimension());
  for (std::size_t b = 0; b < count; ++b) {
    Vec acc(model.dimension(), 0.0);
    for (std::size_t k = 0; k < r; ++k) {
      draw_step(model, rng, z);
      add_scaled(acc, 1.0, z);
    }
    blocks.push_back(std::move(acc));
  }
  return blocks;
}

}  // namespace rvwalk
