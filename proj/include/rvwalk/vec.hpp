#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rvwalk/errors.hpp"

namespace rvwalk {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

inline Vec scaled(std::span<const double> a, double s) {
  Vec out(a.begin(), a.end());
  for (double& x : out) x *= s;
  return out;
}

inline Vec added(std::span<const double> a, std::span<const double> b) {
  Vec out(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

inline Vec subtracted(std::span<const double> a, std::span<const double> b) {
  Vec out(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

// y += s * x
inline void add_scaled(Vec& y, double s, std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

inline Vec normalized(std::span<const double> a) {
  double n = norm(a);
  require(n > 0.0, Errc::invalid_atom, "cannot normalize the zero vector");
  return scaled(a, 1.0 / n);
}

inline Vec unit_axis(std::size_t dim, std::size_t axis, double sign = 1.0) {
  Vec e(dim, 0.0);
  e[axis] = sign;
  return e;
}

}  // namespace rvwalk
