#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace envimp {

using Point = Eigen::Vector2d;

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  /// Affine map of [0, 1] onto the interval.
  double from_unit(double u) const { return lo + u * (hi - lo); }
  double to_unit(double x) const { return (x - lo) / (hi - lo); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Parameter rectangle I x J.
struct Rect {
  Interval s;
  Interval t;

  bool contains(double sv, double tv) const { return s.contains(sv) && t.contains(tv); }
  double diameter() const { return std::hypot(s.length(), t.length()); }
  Point center() const { return {s.mid(), t.mid()}; }

  friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect intersect(const Rect& a, const Rect& b) {
  return {{std::max(a.s.lo, b.s.lo), std::min(a.s.hi, b.s.hi)},
          {std::max(a.t.lo, b.t.lo), std::min(a.t.hi, b.t.hi)}};
}

}  // namespace envimp
