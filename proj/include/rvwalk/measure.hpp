#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "rvwalk/errors.hpp"
#include "rvwalk/model.hpp"
#include "rvwalk/sets.hpp"
#include "rvwalk/vec.hpp"

namespace rvwalk {

enum class Method { closed_form, quadrature };

struct MeasureValue {
  double value;            // >= 0
  double abs_error_bound;  // 0 exactly when method == closed_form
  Method method;
};

namespace detail {

// Radial mass of one interval: nu((lo,hi]) = lo^{-alpha} - hi^{-alpha}.
inline double radial_mass(double alpha, const Interval& iv) {
  const double head = std::pow(iv.lo, -alpha);
  const double tail = std::isfinite(iv.hi) ? std::pow(iv.hi, -alpha) : 0.0;
  return head - tail;
}

// Sensitivity of the radial mass to endpoint placement, for scan-located sections.
inline double radial_mass_err(double alpha, const Interval& iv, double endpoint_tol) {
  double s = alpha * std::pow(iv.lo, -alpha - 1.0);
  if (std::isfinite(iv.hi)) s += alpha * std::pow(iv.hi, -alpha - 1.0);
  return s * endpoint_tol;
}

struct RaySum {
  double value = 0.0;
  double err = 0.0;
  bool exact = true;
  bool infinite = false;
};

inline RaySum sum_over_rays(const RegVarModel& model, const StarSet& set) {
  RaySum out;
  for (const auto& atom : model.atoms()) {
    const IntervalUnion sec = set.ray_section(atom.direction);
    out.exact = out.exact && sec.exact();
    if (sec.is_empty()) continue;
    if (!(sec.min_lo() > 0.0)) {
      out.infinite = true;
      return out;
    }
    for (const Interval& iv : sec.intervals()) {
      out.value += atom.weight * radial_mass(model.alpha(), iv);
      if (!sec.exact()) out.err += atom.weight * radial_mass_err(model.alpha(), iv, 1e-10);
    }
  }
  return out;
}

inline MeasureValue finish(const RaySum& s) {
  if (s.exact) return {s.value, 0.0, Method::closed_form};
  return {s.value, std::max(s.err, 1e-300), Method::quadrature};
}

template <class F>
void adaptive_simpson(F& f, double a, double fa, double m, double fm, double b, double fb,
                      double whole, double tol, int depth, int min_depth, double& acc,
                      double& err_acc) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || (min_depth <= 0 && std::abs(delta) <= 15.0 * tol)) {
    acc += left + right + delta / 15.0;
    err_acc += std::abs(delta) / 15.0;
    return;
  }
  adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, min_depth - 1, acc,
                   err_acc);
  adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, min_depth - 1, acc,
                   err_acc);
}

// A forced minimum refinement depth guards against false convergence when a
// feature falls between the first few nodes.
template <class F>
std::pair<double, double> integrate_adaptive(F f, double a, double b, double tol, int depth = 48,
                                             int min_depth = 3) {
  const double fa = f(a), fb = f(b);
  const double m = 0.5 * (a + b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double acc = 0.0, err = 0.0;
  adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, depth, min_depth, acc, err);
  return {acc, err};
}

}  // namespace detail

// mu(A) = sum_i w_i sum_{(lo,hi) in raysec(A, theta_i)} (lo^{-alpha} - hi^{-alpha}).
// Exact (closed form) whenever every ray section is; infinite mass near the origin
// is detected per ray and rejected.
inline MeasureValue mu(const RegVarModel& model, const StarSet& set) {
  require(set.dimension() == model.dimension(), Errc::invalid_argument,
          "model and set dimensions differ");
  const detail::RaySum s = detail::sum_over_rays(model, set);
  require(!s.infinite, Errc::unbounded_near_origin,
          "mu is infinite: a spectral ray enters the set arbitrarily close to 0");
  return detail::finish(s);
}

// mu(A), with +infinity reported as a value instead of an error. Used where the
// theory consumes exp(-mu(A)) and an infinite measure is a legitimate degenerate limit.
inline double mu_or_infinity(const RegVarModel& model, const StarSet& set) {
  const detail::RaySum s = detail::sum_over_rays(model, set);
  return s.infinite ? kInf : s.value;
}

// The Fréchet scale v = mu(union_{s>=1} s*closure(A)); for increasing A this is mu(A).
// Along each spectral ray the union replaces every interval (lo, hi) by (lo, inf).
inline MeasureValue frechet_scale(const RegVarModel& model, const StarSet& set) {
  require(set.dimension() == model.dimension(), Errc::invalid_argument,
          "model and set dimensions differ");
  if (set.increasing()) return mu(model, set);
  detail::RaySum out;
  for (const auto& atom : model.atoms()) {
    const IntervalUnion sec = set.ray_section(atom.direction).hull_to_infinity();
    out.exact = out.exact && sec.exact();
    if (sec.is_empty()) continue;
    require(sec.min_lo() > 0.0, Errc::unbounded_near_origin,
            "frechet scale is infinite: a spectral ray enters the set arbitrarily close to 0");
    out.value += atom.weight * detail::radial_mass(model.alpha(), sec.intervals().front());
    if (!sec.exact())
      out.err +=
          atom.weight * detail::radial_mass_err(model.alpha(), sec.intervals().front(), 1e-10);
  }
  return detail::finish(out);
}

// The ruin functional mu*(A) = int_0^inf mu(c v + A_c) dv. The integrand is
// nonincreasing (A_c is c-increasing, so c v + A_c shrinks as v grows) and obeys
// mu(c v + A_c) <= (theta v)^{-alpha} for theta = |c| delta / 2, since a point of
// c v + A_c below that radius would have to sit inside the excluded drift cone;
// that bound certifies the truncation error.
//
// The improper integral is computed after the substitution v(s) = rho (s^{-beta} - 1),
// beta = 1/(alpha-1), which maps (0,1] onto [0,inf) and keeps the transformed
// integrand bounded, so the quadrature cost stays flat as alpha approaches 1.
inline MeasureValue mu_star(const RegVarModel& model, const StarSet& set, const Vec& c,
                            double tol = 1e-9) {
  require(model.alpha() > 1.0, Errc::divergent_integral, "mu_star requires alpha > 1");
  require(tol > 0.0, Errc::invalid_argument, "quadrature tolerance must be positive");
  const StarSet hull = c_hull(set, c);
  const MeasureValue at_zero = mu(model, hull);
  if (at_zero.value == 0.0) return at_zero;  // no spectral mass ever reaches the target

  const double delta = set.cone_delta(c);
  require(delta > 0.0, Errc::divergent_integral,
          "the integrand does not decay: the target admits no positive cone aperture "
          "along this drift");

  const double alpha = model.alpha();
  const double cn = norm(c);
  const double theta = 0.5 * cn * delta;
  const double beta = 1.0 / (alpha - 1.0);

  // truncation point with certified tail integral <= tol/2
  const double v_tail =
      std::pow(2.0 * std::pow(theta, -alpha) / ((alpha - 1.0) * tol), 1.0 / (alpha - 1.0));
  const double rho = std::max(hull.bounded_away() / cn, 1e-3);
  const double s_min = std::pow(rho / (rho + v_tail), alpha - 1.0);
  const double v_cut = rho * (std::pow(s_min, -beta) - 1.0);

  Vec shift(c.size());
  auto g = [&](double v) {
    for (std::size_t i = 0; i < c.size(); ++i) shift[i] = c[i] * v;
    return mu(model, translate(hull, shift)).value;
  };
  auto h = [&](double s) {
    const double v = rho * (std::pow(s, -beta) - 1.0);
    return g(v) * rho * beta * std::pow(s, -beta - 1.0);
  };

  // panel edges on a geometric ladder in v, so every decay scale of the integrand
  // is sampled even when rho misjudges it
  std::vector<double> edges{1.0};
  for (double v = 0.0625 * rho; v < v_cut; v *= 4.0)
    edges.push_back(std::pow(rho / (rho + v), alpha - 1.0));
  edges.push_back(s_min);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  double value = 0.0, quad_err = 0.0;
  const double panel_tol = 0.5 * tol / static_cast<double>(edges.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto [v_i, e_i] = detail::integrate_adaptive(h, edges[i], edges[i + 1], panel_tol);
    value += v_i;
    quad_err += e_i;
  }
  const double tail_bound = std::pow(theta, -alpha) * std::pow(v_cut, 1.0 - alpha) / (alpha - 1.0);
  return {std::max(value, 0.0), std::max(quad_err + tail_bound, 1e-300), Method::quadrature};
}

// Closed form of mu* for half-space targets:
//   sum_i w_i (theta_i, d)_+^alpha * a^{1-alpha} / ((alpha-1) (c, d)).
// Kept separate from the quadrature path so the two stay independent checks.
inline double mu_star_half_space_closed_form(const RegVarModel& model, const Vec& d, double a,
                                             const Vec& c) {
  const double cd = dot(c, d);
  require(model.alpha() > 1.0, Errc::divergent_integral, "mu_star requires alpha > 1");
  require(cd > 0.0, Errc::divergent_integral, "(c, d) must be positive for a finite mu*");
  double mass = 0.0;
  for (const auto& atom : model.atoms()) {
    const double proj = dot(atom.direction, d);
    if (proj > 0.0) mass += atom.weight * std::pow(proj, model.alpha());
  }
  return mass * std::pow(a, 1.0 - model.alpha()) / ((model.alpha() - 1.0) * cd);
}

// Finite-dimensional restriction of the path limit measure:
//   m_{t_1..t_k}(A_1 x ... x A_k) = sum_{i<=j} (t_i - t_{i-1}) mu(A_i ∩ ... ∩ A_k),
// j the first index whose set excludes 0. Every A_i must either contain a
// neighborhood of 0 or be bounded away from it; ambiguous sets are rejected.
inline MeasureValue m_fidi(const RegVarModel& model, const std::vector<double>& times,
                           const std::vector<StarSet>& sets) {
  require(!times.empty() && times.size() == sets.size(), Errc::invalid_argument,
          "m_fidi needs matching nonempty times and sets");
  double prev = 0.0;
  for (double t : times) {
    require(t >= prev && t <= 1.0, Errc::invalid_argument,
            "times must be nondecreasing and lie in [0,1]");
    prev = t;
  }

  std::size_t j = times.size();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    require(sets[i].dimension() == model.dimension(), Errc::invalid_argument,
            "model and set dimensions differ");
    const ZeroClass z = sets[i].zero_class();
    require(z != ZeroClass::mixed, Errc::mixed_set,
            "each set must contain a neighborhood of 0 or be bounded away from it");
    if (z == ZeroClass::bounded_away && j == times.size()) j = i;
  }
  require(j < times.size(), Errc::infinite_measure,
          "no set is bounded away from 0, so the restriction has infinite mass");

  double value = 0.0, err = 0.0;
  bool exact = true;
  for (std::size_t i = 0; i <= j; ++i) {
    const std::vector<StarSet> tail_sets(sets.begin() + static_cast<std::ptrdiff_t>(i), sets.end());
    const MeasureValue m = mu(model, intersect(tail_sets));
    const double dt = times[i] - (i == 0 ? 0.0 : times[i - 1]);
    value += dt * m.value;
    err += dt * m.abs_error_bound;
    exact = exact && m.method == Method::closed_form;
  }
  if (exact) return {value, 0.0, Method::closed_form};
  return {value, std::max(err, 1e-300), Method::quadrature};
}

}  // namespace rvwalk
