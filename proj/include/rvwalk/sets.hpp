#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rvwalk/errors.hpp"
#include "rvwalk/model.hpp"
#include "rvwalk/vec.hpp"

namespace rvwalk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Interval unions: carriers for ray sections {r > 0 : r*theta in A}.
// ---------------------------------------------------------------------------

struct Interval {
  double lo;
  double hi;
};

class IntervalUnion {
 public:
  IntervalUnion() = default;

  static IntervalUnion from_intervals(std::vector<Interval> ivs, bool exact) {
    std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    IntervalUnion out;
    out.exact_ = exact;
    for (const Interval& iv : ivs) {
      if (!(iv.lo < iv.hi)) continue;  // measure-null touch points are dropped
      if (!out.ivs_.empty() && iv.lo <= out.ivs_.back().hi)
        out.ivs_.back().hi = std::max(out.ivs_.back().hi, iv.hi);
      else
        out.ivs_.push_back(iv);
    }
    return out;
  }

  static IntervalUnion empty(bool exact = true) {
    IntervalUnion u;
    u.exact_ = exact;
    return u;
  }

  bool is_empty() const { return ivs_.empty(); }
  bool exact() const { return exact_; }
  const std::vector<Interval>& intervals() const { return ivs_; }

  bool contains(double r, bool closed = true) const {
    for (const Interval& iv : ivs_) {
      if (closed ? (r >= iv.lo && r <= iv.hi) : (r > iv.lo && r < iv.hi)) return true;
      if (iv.lo > r) break;
    }
    return false;
  }

  IntervalUnion intersect(const IntervalUnion& other) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < ivs_.size() && j < other.ivs_.size()) {
      const Interval& a = ivs_[i];
      const Interval& b = other.ivs_[j];
      const double lo = std::max(a.lo, b.lo);
      const double hi = std::min(a.hi, b.hi);
      if (lo < hi) out.push_back({lo, hi});
      if (a.hi < b.hi)
        ++i;
      else
        ++j;
    }
    return from_intervals(std::move(out), exact_ && other.exact_);
  }

  // The union of s*section over s >= 1: each (lo, hi) becomes (lo, inf).
  IntervalUnion hull_to_infinity() const {
    if (ivs_.empty()) return empty(exact_);
    return from_intervals({{ivs_.front().lo, kInf}}, exact_);
  }

  // The union of s*section over s in [t, 1]: each (lo, hi) becomes (t*lo, hi).
  IntervalUnion scale_union(double t) const {
    std::vector<Interval> out;
    out.reserve(ivs_.size());
    for (const Interval& iv : ivs_) out.push_back({t * iv.lo, iv.hi});
    return from_intervals(std::move(out), exact_);
  }

  double min_lo() const { return ivs_.empty() ? kInf : ivs_.front().lo; }

 private:
  std::vector<Interval> ivs_;
  bool exact_ = true;
};

enum class ZeroClass { bounded_away, zero_neighborhood, mixed };

enum class ScaleUnionMode { closed, open };

// ---------------------------------------------------------------------------
// Set implementations.
// ---------------------------------------------------------------------------

namespace detail {

struct SetBase;
using SetPtr = std::shared_ptr<const SetBase>;

// Boundary between "outside at 0+" and "inside at hi"; membership at 0 is taken as false.
inline double bisect_from_zero(const std::function<bool(double)>& member, double hi) {
  double lo = 0.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (member(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Scan membership along r -> member(r) over (0, bound], bracketing sign changes on a
// grid of the given resolution and bisecting each boundary to 1e-10.
inline IntervalUnion scan_ray_section(const std::function<bool(double)>& member, double bound,
                                      double resolution, bool extend_to_infinity) {
  require(bound > 0.0, Errc::missing_bound, "a positive search bound must be declared");
  require(resolution > 0.0, Errc::invalid_argument, "scan resolution must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(bound / resolution));
  const double h = bound / static_cast<double>(steps);

  auto bisect = [&](double lo, double hi) {
    // invariant: member(lo) != member(hi)
    const bool lo_in = member(lo);
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (member(mid) == lo_in)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  std::vector<Interval> out;
  bool inside = false;  // state as r -> 0+
  double prev = 0.0;
  double open_lo = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const double r = static_cast<double>(k) * h;
    const bool in = member(r);
    if (in != inside) {
      const double edge = (prev == 0.0 && in) ? bisect_from_zero(member, r) : bisect(prev, r);
      if (in)
        open_lo = edge;
      else
        out.push_back({open_lo, edge});
      inside = in;
    }
    prev = r;
  }
  if (inside) out.push_back({open_lo, extend_to_infinity ? kInf : bound});
  return IntervalUnion::from_intervals(std::move(out), /*exact=*/false);
}

struct SetBase : std::enable_shared_from_this<SetBase> {
  explicit SetBase(std::size_t d) : dim(d) {}
  virtual ~SetBase() = default;

  std::size_t dim;

  virtual bool contains(std::span<const double> x) const = 0;
  virtual IntervalUnion ray_section(std::span<const double> theta) const = 0;
  virtual double bounded_away() const = 0;
  virtual bool increasing() const { return false; }
  virtual ZeroClass zero_class() const {
    return bounded_away() > 0.0 ? ZeroClass::bounded_away : ZeroClass::mixed;
  }
  // Largest delta such that the set avoids the cone K_c^delta (0 when none is known).
  virtual double cone_delta(std::span<const double> c) const {
    (void)c;
    return 0.0;
  }
  virtual SetPtr translated(const Vec& w) const {
    (void)w;
    fail(Errc::unsupported_shape, "translation is not supported for this shape");
  }
  virtual SetPtr scaled_copy(double s) const {
    (void)s;
    fail(Errc::unsupported_shape, "scaling is not supported for this shape");
  }
  virtual SetPtr dilated(double eps) const {
    (void)eps;
    fail(Errc::unsupported_shape, "dilation has closed form only for catalog shapes");
  }
  virtual SetPtr eroded(double eps) const {
    (void)eps;
    fail(Errc::unsupported_shape, "erosion has closed form only for catalog shapes");
  }
};

// {x : (x, d) >= a}, a > 0, |d| = 1. Closed by convention; mu does not charge the
// boundary hyperplane unless an atom lies exactly in it, a documented degeneracy.
struct HalfSpaceSet final : SetBase {
  Vec d;
  double a;

  HalfSpaceSet(Vec dir, double offset) : SetBase(dir.size()), d(std::move(dir)), a(offset) {
    require(a > 0.0, Errc::invalid_argument, "half-space offset a must be > 0");
  }

  bool contains(std::span<const double> x) const override { return dot(x, d) >= a; }

  IntervalUnion ray_section(std::span<const double> theta) const override {
    const double proj = dot(theta, d);
    if (proj <= 0.0) return IntervalUnion::empty();
    return IntervalUnion::from_intervals({{a / proj, kInf}}, true);
  }

  double bounded_away() const override { return a; }
  bool increasing() const override { return true; }
  ZeroClass zero_class() const override { return ZeroClass::bounded_away; }

  double cone_delta(std::span<const double> c) const override {
    const double cn = norm(c);
    if (cn == 0.0) return 0.0;
    return std::max(0.0, dot(d, c) / cn);
  }

  SetPtr translated(const Vec& w) const override {
    const double shifted = a + dot(w, d);
    require(shifted > 0.0, Errc::invalid_argument,
            "translation would move the half-space boundary across the origin");
    return std::make_shared<HalfSpaceSet>(d, shifted);
  }
  SetPtr scaled_copy(double s) const override { return std::make_shared<HalfSpaceSet>(d, s * a); }
  SetPtr dilated(double eps) const override {
    require(a - eps > 0.0, Errc::invalid_epsilon, "dilation would reach the origin");
    return std::make_shared<HalfSpaceSet>(d, a - eps);
  }
  SetPtr eroded(double eps) const override { return std::make_shared<HalfSpaceSet>(d, a + eps); }
};

// Axis-aligned box with possibly infinite bounds; may be empty (after erosion).
struct BoxSet final : SetBase {
  Vec lo, hi;

  BoxSet(Vec lower, Vec upper) : SetBase(lower.size()), lo(std::move(lower)), hi(std::move(upper)) {
    require(lo.size() == hi.size(), Errc::invalid_argument, "box bounds must share one dimension");
  }

  bool empty() const {
    for (std::size_t i = 0; i < dim; ++i)
      if (!(lo[i] <= hi[i])) return true;
    return false;
  }

  bool contains(std::span<const double> x) const override {
    for (std::size_t i = 0; i < dim; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  IntervalUnion ray_section(std::span<const double> theta) const override {
    if (empty()) return IntervalUnion::empty();
    double rlo = 0.0, rhi = kInf;
    for (std::size_t i = 0; i < dim; ++i) {
      const double t = theta[i];
      if (t > 0.0) {
        rlo = std::max(rlo, lo[i] / t);
        rhi = std::min(rhi, hi[i] / t);
      } else if (t < 0.0) {
        rlo = std::max(rlo, hi[i] / t);
        rhi = std::min(rhi, lo[i] / t);
      } else {
        if (lo[i] > 0.0 || hi[i] < 0.0) return IntervalUnion::empty();
      }
    }
    if (!(rlo < rhi)) return IntervalUnion::empty();
    return IntervalUnion::from_intervals({{std::max(rlo, 0.0), rhi}}, true);
  }

  double bounded_away() const override {
    if (empty()) return kInf;
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double gap = 0.0;
      if (lo[i] > 0.0)
        gap = lo[i];
      else if (hi[i] < 0.0)
        gap = -hi[i];
      s += gap * gap;
    }
    return std::sqrt(s);
  }

  bool increasing() const override {
    if (empty()) return false;
    for (std::size_t i = 0; i < dim; ++i) {
      const bool up = lo[i] >= 0.0 && hi[i] == kInf;
      const bool down = hi[i] <= 0.0 && lo[i] == -kInf;
      const bool full = lo[i] == -kInf && hi[i] == kInf;
      if (!(up || down || full)) return false;
    }
    return true;
  }

  ZeroClass zero_class() const override {
    if (bounded_away() > 0.0) return ZeroClass::bounded_away;
    bool interior = true;
    for (std::size_t i = 0; i < dim; ++i) interior = interior && lo[i] < 0.0 && hi[i] > 0.0;
    return interior ? ZeroClass::zero_neighborhood : ZeroClass::mixed;
  }

  // Conservative: the box is contained in each axis half-space with a positive gap.
  double cone_delta(std::span<const double> c) const override {
    const double cn = norm(c);
    if (cn == 0.0 || empty()) return 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      if (lo[i] > 0.0) best = std::max(best, c[i] / cn);
      if (hi[i] < 0.0) best = std::max(best, -c[i] / cn);
    }
    return std::max(best, 0.0);
  }

  SetPtr translated(const Vec& w) const override {
    Vec l = lo, h = hi;
    for (std::size_t i = 0; i < dim; ++i) {
      if (std::isfinite(l[i])) l[i] += w[i];
      if (std::isfinite(h[i])) h[i] += w[i];
    }
    return std::make_shared<BoxSet>(std::move(l), std::move(h));
  }
  SetPtr scaled_copy(double s) const override {
    Vec l = lo, h = hi;
    for (std::size_t i = 0; i < dim; ++i) {
      l[i] *= s;
      h[i] *= s;
    }
    return std::make_shared<BoxSet>(std::move(l), std::move(h));
  }
  SetPtr dilated(double eps) const override {
    Vec l = lo, h = hi;
    for (std::size_t i = 0; i < dim; ++i) {
      if (std::isfinite(l[i])) l[i] -= eps;
      if (std::isfinite(h[i])) h[i] += eps;
    }
    auto out = std::make_shared<BoxSet>(std::move(l), std::move(h));
    require(!(bounded_away() > 0.0) || out->bounded_away() > 0.0, Errc::invalid_epsilon,
            "dilation would reach the origin");
    return out;
  }
  SetPtr eroded(double eps) const override {
    Vec l = lo, h = hi;
    for (std::size_t i = 0; i < dim; ++i) {
      if (std::isfinite(l[i])) l[i] += eps;
      if (std::isfinite(h[i])) h[i] -= eps;
    }
    return std::make_shared<BoxSet>(std::move(l), std::move(h));
  }
};

// {x : |x| >= rho}.
struct BallComplementSet final : SetBase {
  double rho;

  BallComplementSet(std::size_t d, double radius) : SetBase(d), rho(radius) {
    require(rho > 0.0, Errc::invalid_argument, "ball-complement radius must be > 0");
  }

  bool contains(std::span<const double> x) const override { return norm(x) >= rho; }
  IntervalUnion ray_section(std::span<const double>) const override {
    return IntervalUnion::from_intervals({{rho, kInf}}, true);
  }
  double bounded_away() const override { return rho; }
  bool increasing() const override { return true; }
  ZeroClass zero_class() const override { return ZeroClass::bounded_away; }

  SetPtr scaled_copy(double s) const override {
    return std::make_shared<BallComplementSet>(dim, s * rho);
  }
  SetPtr dilated(double eps) const override {
    require(rho - eps > 0.0, Errc::invalid_epsilon, "dilation would reach the origin");
    return std::make_shared<BallComplementSet>(dim, rho - eps);
  }
  SetPtr eroded(double eps) const override {
    return std::make_shared<BallComplementSet>(dim, rho + eps);
  }
};

// Complement of the cone K_c^delta = {x != 0 : |x/|x| + c/|c|| < delta}: everything whose
// direction stays chordal distance >= delta from the pure drift direction -c/|c|.
// Not bounded away from zero; used for cone-condition bookkeeping, not as a mu target.
struct ConeComplementSet final : SetBase {
  Vec chat;  // unit drift direction
  double delta;

  ConeComplementSet(Vec drift, double d)
      : SetBase(drift.size()), chat(normalized(drift)), delta(d) {
    require(delta > 0.0 && delta <= 2.0, Errc::invalid_argument,
            "cone aperture delta must lie in (0, 2]");
  }

  bool direction_outside(std::span<const double> theta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double v = theta[i] + chat[i];
      s += v * v;
    }
    return std::sqrt(s) >= delta;
  }

  bool contains(std::span<const double> x) const override {
    const double n = norm(x);
    if (n == 0.0) return false;
    Vec t(x.begin(), x.end());
    for (double& v : t) v /= n;
    return direction_outside(t);
  }

  IntervalUnion ray_section(std::span<const double> theta) const override {
    if (!direction_outside(theta)) return IntervalUnion::empty();
    return IntervalUnion::from_intervals({{0.0, kInf}}, true);
  }

  double bounded_away() const override { return 0.0; }
  bool increasing() const override { return true; }
  ZeroClass zero_class() const override { return ZeroClass::mixed; }

  double cone_delta(std::span<const double> c) const override {
    const double cn = norm(c);
    if (cn == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double v = c[i] / cn - chat[i];
      s += v * v;
    }
    return std::max(0.0, delta - std::sqrt(s));
  }

  SetPtr scaled_copy(double) const override {
    return std::static_pointer_cast<const SetBase>(shared_from_this());
  }
};

// Complement of [0, upper_1] x ... x [0, upper_d]; the target family of the block
// maxima limit. Touches the origin, so it is a valid mu argument only along atoms
// whose ray sections start at a positive radius.
struct BoxComplementSet final : SetBase {
  Vec upper;

  explicit BoxComplementSet(Vec u) : SetBase(u.size()), upper(std::move(u)) {
    for (double v : upper)
      require(v > 0.0, Errc::invalid_argument, "box-complement requires strictly positive bounds");
  }

  bool contains(std::span<const double> x) const override {
    for (std::size_t i = 0; i < dim; ++i)
      if (x[i] < 0.0 || x[i] > upper[i]) return true;
    return false;
  }

  IntervalUnion ray_section(std::span<const double> theta) const override {
    double m = kInf;
    for (std::size_t i = 0; i < dim; ++i) {
      if (theta[i] < 0.0) return IntervalUnion::from_intervals({{0.0, kInf}}, true);
      if (theta[i] > 0.0) m = std::min(m, upper[i] / theta[i]);
    }
    if (m == kInf) return IntervalUnion::empty();
    return IntervalUnion::from_intervals({{m, kInf}}, true);
  }

  double bounded_away() const override { return 0.0; }
  bool increasing() const override { return true; }
  ZeroClass zero_class() const override { return ZeroClass::mixed; }

  SetPtr scaled_copy(double s) const override {
    Vec u = upper;
    for (double& v : u) v *= s;
    return std::make_shared<BoxComplementSet>(std::move(u));
  }
};

struct GenericOptions {
  double search_bound = 0.0;   // required for ray sections
  double bounded_away = 0.0;   // declared; the toolkit cannot infer it
  bool increasing = false;     // declared
  double resolution = 1e-3;    // scan step for bracketing membership changes
  double cone_delta = 0.0;     // declared; required before c-hulling
};

struct GenericSet final : SetBase {
  std::function<bool(std::span<const double>)> pred;
  GenericOptions opts;

  GenericSet(std::function<bool(std::span<const double>)> p, std::size_t d, GenericOptions o)
      : SetBase(d), pred(std::move(p)), opts(o) {}

  bool contains(std::span<const double> x) const override { return pred(x); }

  IntervalUnion ray_section(std::span<const double> theta) const override {
    require(opts.search_bound > 0.0, Errc::missing_bound,
            "generic sets must declare a ray search bound");
    Vec point(dim);
    auto member = [&](double r) {
      for (std::size_t i = 0; i < dim; ++i) point[i] = r * theta[i];
      return pred(point);
    };
    return scan_ray_section(member, opts.search_bound, opts.resolution, opts.increasing);
  }

  double bounded_away() const override { return opts.bounded_away; }
  bool increasing() const override { return opts.increasing; }
  double cone_delta(std::span<const double>) const override { return opts.cone_delta; }

  SetPtr translated(const Vec& w) const override {
    GenericOptions o = opts;
    o.search_bound = opts.search_bound > 0.0 ? opts.search_bound + norm(w) : 0.0;
    o.bounded_away = std::max(0.0, opts.bounded_away - norm(w));
    o.increasing = false;
    auto p = pred;
    Vec shift = w;
    auto moved = [p, shift](std::span<const double> x) {
      Vec y(x.begin(), x.end());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] -= shift[i];
      return p(y);
    };
    return std::make_shared<GenericSet>(moved, dim, o);
  }

  SetPtr scaled_copy(double s) const override {
    GenericOptions o = opts;
    o.search_bound *= s;
    o.bounded_away *= s;
    auto p = pred;
    auto shrunk = [p, s](std::span<const double> x) {
      Vec y(x.begin(), x.end());
      for (double& v : y) v /= s;
      return p(y);
    };
    return std::make_shared<GenericSet>(shrunk, dim, o);
  }
};

// B_c = {x + c t : x in B, t >= 0}; membership tests the backward ray. Only built
// for bases that avoid the drift cone (delta > 0, checked in c_hull).
struct CHullSet final : SetBase {
  SetPtr base;
  Vec c;
  double delta;       // cone aperture inherited from the base
  double scan_step;   // resolution for generic backward-ray scans

  CHullSet(SetPtr b, Vec drift, double d, double step)
      : SetBase(b->dim), base(std::move(b)), c(std::move(drift)), delta(d), scan_step(step) {}

  bool contains(std::span<const double> x) const override {
    if (const auto* box = dynamic_cast<const BoxSet*>(base.get())) {
      // closed-form feasibility of { t >= 0 : x - t c inside the box }
      double tlo = 0.0, thi = kInf;
      for (std::size_t i = 0; i < dim; ++i) {
        const double ci = c[i];
        if (ci > 0.0) {
          tlo = std::max(tlo, (x[i] - box->hi[i]) / ci);
          thi = std::min(thi, (x[i] - box->lo[i]) / ci);
        } else if (ci < 0.0) {
          tlo = std::max(tlo, (x[i] - box->lo[i]) / ci);
          thi = std::min(thi, (x[i] - box->hi[i]) / ci);
        } else {
          if (x[i] < box->lo[i] || x[i] > box->hi[i]) return false;
        }
      }
      return tlo <= thi;
    }
    if (base->contains(x)) return true;
    // backward scan: beyond t* = 2|x|/(delta*|c|) the backward ray is inside the cone
    // the base avoids, so no further hits are possible.
    const double cn = norm(c);
    const double tmax = 2.0 * norm(x) / (delta * cn) + 4.0 * scan_step;
    Vec p(x.begin(), x.end());
    const auto steps = static_cast<std::size_t>(std::ceil(tmax / scan_step));
    for (std::size_t k = 1; k <= steps; ++k) {
      const double t = static_cast<double>(k) * (tmax / static_cast<double>(steps));
      for (std::size_t i = 0; i < dim; ++i) p[i] = x[i] - t * c[i];
      if (base->contains(p)) return true;
    }
    return false;
  }

  IntervalUnion ray_section(std::span<const double> theta) const override {
    const bool convex_base = dynamic_cast<const BoxSet*>(base.get()) != nullptr;
    Vec point(dim);
    auto member = [&](double r) {
      for (std::size_t i = 0; i < dim; ++i) point[i] = r * theta[i];
      return contains(point);
    };
    const double bound = scan_bound();
    return scan_ray_section(member, bound, std::max(scan_step, bound / 1024.0), convex_base);
  }

  double scan_bound() const {
    if (const auto* box = dynamic_cast<const BoxSet*>(base.get())) {
      double m = 1.0;
      for (std::size_t i = 0; i < dim; ++i) {
        if (std::isfinite(box->lo[i])) m = std::max(m, std::abs(box->lo[i]));
        if (std::isfinite(box->hi[i])) m = std::max(m, std::abs(box->hi[i]));
      }
      return 8.0 * m * (1.0 + 2.0 / delta);
    }
    if (const auto* g = dynamic_cast<const GenericSet*>(base.get()))
      return g->opts.search_bound * (1.0 + 2.0 / delta);
    return 64.0 / delta;
  }

  // c v + B_c is a subset of B_c, and hull points keep |x| >= bounded_away * delta/2
  // (the cone-avoidance bound: points this close to the drift axis are excluded).
  double bounded_away() const override {
    return base->bounded_away() * std::min(1.0, 0.5 * delta);
  }

  double cone_delta(std::span<const double> c2) const override {
    // moving along +c only increases the chordal distance from -c/|c|
    const double cn = norm(c2), cn0 = norm(c);
    if (cn == 0.0 || cn0 == 0.0) return 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double v = c2[i] / cn - c[i] / cn0;
      diff += v * v;
    }
    return std::sqrt(diff) < 1e-12 ? delta : 0.0;
  }

  SetPtr translated(const Vec& w) const override {
    return std::make_shared<CHullSet>(base->translated(w), c, delta, scan_step);
  }
  SetPtr scaled_copy(double s) const override {
    return std::make_shared<CHullSet>(base->scaled_copy(s), c, delta, scan_step * s);
  }
};

struct IntersectionSet final : SetBase {
  std::vector<SetPtr> parts;

  explicit IntersectionSet(std::vector<SetPtr> p) : SetBase(p.front()->dim), parts(std::move(p)) {}

  bool contains(std::span<const double> x) const override {
    for (const auto& s : parts)
      if (!s->contains(x)) return false;
    return true;
  }
  IntervalUnion ray_section(std::span<const double> theta) const override {
    IntervalUnion acc = parts.front()->ray_section(theta);
    for (std::size_t i = 1; i < parts.size() && !acc.is_empty(); ++i)
      acc = acc.intersect(parts[i]->ray_section(theta));
    return acc;
  }
  double bounded_away() const override {
    double b = 0.0;
    for (const auto& s : parts) b = std::max(b, s->bounded_away());
    return b;
  }
  bool increasing() const override {
    for (const auto& s : parts)
      if (!s->increasing()) return false;
    return true;
  }
  ZeroClass zero_class() const override {
    bool all_zero = true;
    for (const auto& s : parts) {
      const ZeroClass z = s->zero_class();
      if (z == ZeroClass::bounded_away) return ZeroClass::bounded_away;
      all_zero = all_zero && z == ZeroClass::zero_neighborhood;
    }
    return all_zero ? ZeroClass::zero_neighborhood : ZeroClass::mixed;
  }
};

// A*(t) (closed) or A°(t) (open): the union of s*A over s in [t, 1]. Ray sections
// transform in closed form: (lo, hi) -> (t*lo, hi).
struct ScaleUnionSet final : SetBase {
  SetPtr base;
  double t;
  ScaleUnionMode mode;

  ScaleUnionSet(SetPtr b, double t_, ScaleUnionMode m)
      : SetBase(b->dim), base(std::move(b)), t(t_), mode(m) {}

  bool contains(std::span<const double> x) const override {
    const double r = norm(x);
    if (r == 0.0) return false;
    Vec theta(x.begin(), x.end());
    for (double& v : theta) v /= r;
    return ray_section(theta).contains(r, mode == ScaleUnionMode::closed);
  }
  IntervalUnion ray_section(std::span<const double> theta) const override {
    return base->ray_section(theta).scale_union(t);
  }
  double bounded_away() const override { return t * base->bounded_away(); }
  SetPtr scaled_copy(double s) const override {
    return std::make_shared<ScaleUnionSet>(base->scaled_copy(s), t, mode);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// StarSet: immutable value handle over a set implementation.
// ---------------------------------------------------------------------------

using GenericOptions = detail::GenericOptions;

class StarSet {
 public:
  explicit StarSet(detail::SetPtr impl) : impl_(std::move(impl)) {}

  std::size_t dimension() const { return impl_->dim; }
  bool contains(std::span<const double> x) const { return impl_->contains(x); }
  IntervalUnion ray_section(std::span<const double> theta) const {
    return impl_->ray_section(theta);
  }
  double bounded_away() const { return impl_->bounded_away(); }
  bool increasing() const { return impl_->increasing(); }
  ZeroClass zero_class() const { return impl_->zero_class(); }
  double cone_delta(std::span<const double> c) const { return impl_->cone_delta(c); }

  std::optional<std::pair<Vec, double>> as_half_space() const {
    if (const auto* hs = dynamic_cast<const detail::HalfSpaceSet*>(impl_.get()))
      return std::make_pair(hs->d, hs->a);
    return std::nullopt;
  }

  const detail::SetPtr& impl() const { return impl_; }

  static StarSet half_space(Vec d, double a) {
    return StarSet(std::make_shared<detail::HalfSpaceSet>(normalized(d), a));
  }
  static StarSet box(Vec lower, Vec upper) {
    return StarSet(std::make_shared<detail::BoxSet>(std::move(lower), std::move(upper)));
  }
  static StarSet ball_complement(std::size_t dim, double radius) {
    return StarSet(std::make_shared<detail::BallComplementSet>(dim, radius));
  }
  static StarSet cone_complement(Vec c, double delta) {
    return StarSet(std::make_shared<detail::ConeComplementSet>(std::move(c), delta));
  }
  static StarSet box_complement(Vec upper) {
    return StarSet(std::make_shared<detail::BoxComplementSet>(std::move(upper)));
  }
  static StarSet generic(std::function<bool(std::span<const double>)> pred, std::size_t dim,
                         GenericOptions opts) {
    return StarSet(std::make_shared<detail::GenericSet>(std::move(pred), dim, opts));
  }
  static StarSet full_space(std::size_t dim) {
    return box(Vec(dim, -kInf), Vec(dim, kInf));
  }

 private:
  detail::SetPtr impl_;
};

// Default aperture for K_c^delta: the largest delta keeping every spectral atom outside
// the closed cone, halved to stay clear of atom-on-boundary degeneracies.
inline double default_cone_delta(const RegVarModel& model, const Vec& c) {
  const Vec chat = normalized(c);
  double smallest = 2.0;
  for (const auto& atom : model.atoms()) {
    double s = 0.0;
    for (std::size_t i = 0; i < chat.size(); ++i) {
      const double v = atom.direction[i] + chat[i];
      s += v * v;
    }
    smallest = std::min(smallest, std::sqrt(s));
  }
  return 0.5 * smallest;
}

// ---------------------------------------------------------------------------
// Set-level operations.
// ---------------------------------------------------------------------------

inline StarSet translate(const StarSet& set, const Vec& w) {
  return StarSet(set.impl()->translated(w));
}

inline StarSet scale(const StarSet& set, double s) {
  require(s > 0.0, Errc::invalid_argument, "scale factor must be positive");
  return StarSet(set.impl()->scaled_copy(s));
}

inline StarSet dilate(const StarSet& set, double eps) {
  require(eps > 0.0, Errc::invalid_argument, "dilation radius must be positive");
  return StarSet(set.impl()->dilated(eps));
}

inline StarSet erode(const StarSet& set, double eps) {
  require(eps > 0.0, Errc::invalid_argument, "erosion radius must be positive");
  return StarSet(set.impl()->eroded(eps));
}

inline StarSet intersect(const std::vector<StarSet>& sets) {
  require(!sets.empty(), Errc::invalid_argument, "intersection of nothing");
  if (sets.size() == 1) return sets.front();
  std::vector<detail::SetPtr> parts;
  parts.reserve(sets.size());
  for (const auto& s : sets) {
    require(s.dimension() == sets.front().dimension(), Errc::invalid_argument,
            "intersected sets must share one dimension");
    parts.push_back(s.impl());
  }
  return StarSet(std::make_shared<detail::IntersectionSet>(std::move(parts)));
}

// Smallest c-increasing superset B_c. Half-spaces with (d, c) >= 0 are already
// c-increasing; (d, c) < 0 means the set is reachable by pure drifting and
// makes the ruin functional diverge.
inline StarSet c_hull(const StarSet& set, const Vec& c) {
  require(norm(c) > 0.0, Errc::invalid_argument, "drift vector must be nonzero");
  if (auto hs = set.as_half_space()) {
    require(dot(hs->first, c) >= 0.0, Errc::cone_violation,
            "half-space opposes the drift: (d, c) < 0");
    return set;
  }
  if (const auto* hull = dynamic_cast<const detail::CHullSet*>(set.impl().get())) {
    if (hull->cone_delta(c) > 0.0) return set;  // already hulled along this drift
  }
  const double delta = set.cone_delta(c);
  require(delta > 0.0, Errc::cone_violation,
          "set meets every cone K_c^delta around the drift direction "
          "(declare cone_delta for generic sets)");
  double step = 1e-2;
  if (const auto* g = dynamic_cast<const detail::GenericSet*>(set.impl().get()))
    step = g->opts.resolution;
  else if (set.bounded_away() > 0.0)
    step = std::min(step, set.bounded_away() / 64.0);
  return StarSet(std::make_shared<detail::CHullSet>(set.impl(), c, delta, step));
}

// A*(t) / A°(t): for increasing sets these collapse to t*A (closed or open copy).
inline StarSet scale_union(const StarSet& set, double t, ScaleUnionMode mode) {
  require(t > 0.0 && t < 1.0, Errc::invalid_argument, "scale_union requires t in (0,1)");
  if (set.increasing()) return scale(set, t);
  return StarSet(std::make_shared<detail::ScaleUnionSet>(set.impl(), t, mode));
}

}  // namespace rvwalk
