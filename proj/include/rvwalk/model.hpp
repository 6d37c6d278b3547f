#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "rvwalk/errors.hpp"
#include "rvwalk/rng.hpp"
#include "rvwalk/vec.hpp"

namespace rvwalk {

struct TailIndex {
  double alpha;  // > 0
};

struct SpectralAtom {
  Vec direction;  // unit vector
  double weight;  // in (0,1], weights sum to 1 over all atoms
};

enum class Centering { none, mean_zero };

// A regularly varying step law in product form: Z = R*Theta - centering, with
// R exactly Pareto(alpha) on [1,inf) (P(R > r) = r^{-alpha}) and Theta drawn
// from a discrete spectral measure on the unit sphere. This is the smallest
// family realizing any limit pair (alpha, discrete spectral law), and it keeps
// the pre-centering radial tail exact, so the limit measure is evaluable in
// closed form along spectral rays.
//
// Normalization: mu({x : |x| > 1}) = 1.
class RegVarModel {
 public:
  RegVarModel(TailIndex tail, std::vector<SpectralAtom> atoms, Centering mode, Vec centering,
              std::size_t dim, double noise_radius)
      : tail_(tail),
        atoms_(std::move(atoms)),
        mode_(mode),
        centering_(std::move(centering)),
        dim_(dim),
        noise_radius_(noise_radius) {
    cumulative_.reserve(atoms_.size());
    double acc = 0.0;
    for (const auto& a : atoms_) {
      acc += a.weight;
      cumulative_.push_back(acc);
    }
    if (!cumulative_.empty()) cumulative_.back() = 1.0;
  }

  double alpha() const { return tail_.alpha; }
  const TailIndex& tail() const { return tail_; }
  const std::vector<SpectralAtom>& atoms() const { return atoms_; }
  Centering centering_mode() const { return mode_; }
  const Vec& centering() const { return centering_; }
  std::size_t dimension() const { return dim_; }
  double noise_radius() const { return noise_radius_; }

  // Sum of w_i * theta_i; the spectral barycenter.
  Vec spectral_mean() const {
    Vec m(dim_, 0.0);
    for (const auto& a : atoms_) add_scaled(m, a.weight, a.direction);
    return m;
  }

  // E(Z) = 0 either by explicit centering or by spectral symmetry (alpha >= 1).
  bool is_mean_zero() const {
    if (mode_ == Centering::mean_zero) return true;
    return tail_.alpha >= 1.0 && norm(spectral_mean()) <= 1e-12;
  }

  std::size_t pick_atom(double u) const {
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return atoms_.size() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  TailIndex tail_;
  std::vector<SpectralAtom> atoms_;
  Centering mode_;
  Vec centering_;
  std::size_t dim_;
  double noise_radius_;
  std::vector<double> cumulative_;
};

inline RegVarModel make_model(double alpha, const std::vector<std::pair<Vec, double>>& atoms,
                              Centering mode, double noise_radius = 0.0) {
  require(alpha > 0.0, Errc::invalid_argument, "tail index alpha must be > 0");
  require(!atoms.empty(), Errc::invalid_atom, "at least one spectral atom is required");
  require(noise_radius >= 0.0 && noise_radius < 0.5, Errc::invalid_argument,
          "noise_radius must lie in [0, 0.5)");
  if (mode == Centering::mean_zero)
    require(alpha > 1.0, Errc::unsupported_centering,
            "mean-zero centering requires alpha > 1 (the step mean does not exist otherwise)");

  const std::size_t dim = atoms.front().first.size();
  double total = 0.0;
  std::vector<SpectralAtom> normalized_atoms;
  normalized_atoms.reserve(atoms.size());
  for (const auto& [dir, w] : atoms) {
    require(dir.size() == dim, Errc::invalid_atom, "atom directions must share one dimension");
    require(norm(dir) > 0.0, Errc::invalid_atom, "atom direction must not be the zero vector");
    require(w > 0.0, Errc::invalid_atom, "atom weights must be positive");
    normalized_atoms.push_back({normalized(dir), w});
    total += w;
  }
  for (auto& a : normalized_atoms) a.weight /= total;

  Vec centering(dim, 0.0);
  if (mode == Centering::mean_zero) {
    // E(R*Theta) with R ~ Pareto(alpha): E(R) = alpha/(alpha-1).
    const double mean_radius = alpha / (alpha - 1.0);
    for (const auto& a : normalized_atoms) add_scaled(centering, mean_radius * a.weight, a.direction);
  }
  return RegVarModel({alpha}, std::move(normalized_atoms), mode, std::move(centering), dim,
                     noise_radius);
}

// P(R > x) for the exact pre-centering radial law: min(1, x^{-alpha}).
inline double radial_tail(const RegVarModel& model, double x) {
  require(x >= 0.0, Errc::invalid_argument, "radial_tail requires x >= 0");
  if (x <= 1.0) return 1.0;
  return std::pow(x, -model.alpha());
}

struct AnValue {
  double value;
  std::size_t pilot_size;  // 0 for the analytic rule
};

// Normalizing sequences of the limit theory. lambda_n is the large-deviation
// scale, a_n solves n*P(|Z| > a_n) -> 1 (analytically a_n = n^{1/alpha} for the
// pre-centering radial law).
struct ScalingSchedule {
  enum class LambdaRule { linear, sqrt_nlogn, table };
  enum class ARule { analytic, empirical };

  LambdaRule lambda_rule = LambdaRule::linear;
  double coefficient = 1.0;  // c for linear, a for sqrt_nlogn
  std::vector<std::pair<long long, double>> table;

  ARule a_rule = ARule::analytic;
  std::size_t pilot_size = 0;
  std::uint64_t pilot_seed = kDefaultSeed;

  static ScalingSchedule linear(double c) {
    require(c > 0.0, Errc::invalid_argument, "linear schedule requires c > 0");
    ScalingSchedule s;
    s.lambda_rule = LambdaRule::linear;
    s.coefficient = c;
    return s;
  }
  static ScalingSchedule sqrt_nlogn(double a) {
    require(a > 0.0, Errc::invalid_argument, "sqrt-nlogn schedule requires a > 0");
    ScalingSchedule s;
    s.lambda_rule = LambdaRule::sqrt_nlogn;
    s.coefficient = a;
    return s;
  }
  static ScalingSchedule from_table(std::vector<std::pair<long long, double>> rows) {
    ScalingSchedule s;
    s.lambda_rule = LambdaRule::table;
    s.table = std::move(rows);
    std::sort(s.table.begin(), s.table.end());
    return s;
  }

  ScalingSchedule& with_empirical_a(std::size_t pilot, std::uint64_t seed = kDefaultSeed) {
    a_rule = ARule::empirical;
    pilot_size = pilot;
    pilot_seed = seed;
    return *this;
  }
};

inline double lambda_n(const ScalingSchedule& s, long long n) {
  require(n >= 1, Errc::invalid_argument, "lambda_n requires n >= 1");
  switch (s.lambda_rule) {
    case ScalingSchedule::LambdaRule::linear:
      return s.coefficient * static_cast<double>(n);
    case ScalingSchedule::LambdaRule::sqrt_nlogn:
      return s.coefficient * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
    case ScalingSchedule::LambdaRule::table: {
      auto it = std::lower_bound(s.table.begin(), s.table.end(), std::make_pair(n, 0.0));
      require(it != s.table.end() && it->first == n, Errc::schedule_out_of_range,
              "custom lambda table has no entry for this n");
      return it->second;
    }
  }
  fail(Errc::invalid_argument, "unknown lambda rule");
}

// The regimes under which the large-deviation limit holds for this schedule:
// linear lambda_n = c*n needs alpha >= 1 and a mean-zero walk; a*sqrt(n log n)
// is the classical alpha > 2 threshold and needs a > sqrt(alpha-2).
inline void validate_schedule(const RegVarModel& model, const ScalingSchedule& s) {
  switch (s.lambda_rule) {
    case ScalingSchedule::LambdaRule::linear:
      require(model.alpha() >= 1.0 && model.is_mean_zero(), Errc::schedule_out_of_range,
              "linear lambda_n = c*n is valid only for alpha >= 1 with a mean-zero model");
      return;
    case ScalingSchedule::LambdaRule::sqrt_nlogn:
      require(model.alpha() > 2.0, Errc::schedule_out_of_range,
              "sqrt-nlogn lambda_n is valid only for alpha > 2");
      require(s.coefficient > std::sqrt(model.alpha() - 2.0), Errc::schedule_out_of_range,
              "sqrt-nlogn schedule requires a > sqrt(alpha - 2)");
      require(model.is_mean_zero(), Errc::schedule_out_of_range,
              "sqrt-nlogn schedule requires a mean-zero model");
      return;
    case ScalingSchedule::LambdaRule::table:
      return;  // the caller vouches for a custom table
  }
}

namespace detail {
// Pre-centering radial draw R = U^{-1/alpha}; fast paths for common indices.
inline double pareto_radius(double alpha, double u) {
  if (alpha == 2.0) return 1.0 / std::sqrt(u);
  if (alpha == 1.0) return 1.0 / u;
  if (alpha == 1.5) return std::cbrt(1.0 / (u * u));
  return std::pow(u, -1.0 / alpha);
}
}  // namespace detail

inline AnValue a_n(const RegVarModel& model, const ScalingSchedule& s, long long n) {
  require(n >= 1, Errc::invalid_argument, "a_n requires n >= 1");
  if (s.a_rule == ScalingSchedule::ARule::analytic)
    return {std::pow(static_cast<double>(n), 1.0 / model.alpha()), 0};

  require(s.pilot_size >= 10 * static_cast<std::size_t>(n), Errc::insufficient_pilot,
          "empirical a_n needs a pilot of size >= 10*n");
  // (1 - 1/n) sample quantile of the pre-centering radius |R*Theta| = R.
  SplitMix64 rng(derive_seed(s.pilot_seed, 0x70696C6F74));  // "pilot"
  std::vector<double> radii(s.pilot_size);
  for (double& r : radii) r = detail::pareto_radius(model.alpha(), rng.uniform01());
  const double q = 1.0 - 1.0 / static_cast<double>(n);
  auto k = static_cast<std::size_t>(q * static_cast<double>(s.pilot_size - 1));
  std::nth_element(radii.begin(), radii.begin() + static_cast<std::ptrdiff_t>(k), radii.end());
  return {radii[k], s.pilot_size};
}

// gamma_n = [n * P(|Z| > lambda_n)]^{-1}, with the pre-centering radial tail
// standing in for P(|Z| > x) (the approximation error is O(x^{-alpha-1})).
inline double gamma_n(const RegVarModel& model, const ScalingSchedule& s, long long n) {
  const double lam = lambda_n(s, n);
  require(lam > 1.0, Errc::schedule_out_of_range,
          "lambda_n must exceed the radial support edge (lambda_n > 1)");
  const double tail = radial_tail(model, lam);
  return 1.0 / (static_cast<double>(n) * tail);
}

}  // namespace rvwalk
