#pragma once

#include <string>

#include "envimp/bipoly.hpp"
#include "envimp/domain.hpp"

namespace envimp {

/// A rational family of planar curves p(s,t) = (x/w, y/w) over I x J.
///
/// On construction x, y and w are trimmed and padded to their common
/// bidegree (n1, n2), and w is checked for zeros and sign changes on a dense
/// grid. Throws InvalidInput for an empty interval and DenominatorNearZero if
/// w vanishes on the domain.
class RationalFamily {
public:
  RationalFamily(BiPoly x, BiPoly y, BiPoly w, Rect domain);

  const BiPoly& x() const { return x_; }
  const BiPoly& y() const { return y_; }
  const BiPoly& w() const { return w_; }
  const Rect& domain() const { return domain_; }
  int n1() const { return x_.deg_s(); }
  int n2() const { return x_.deg_t(); }

  /// Same polynomials over a different parameter rectangle.
  RationalFamily restricted_to(const Rect& region) const;

  /// Threshold below which |w| counts as zero.
  double w_tolerance() const;

private:
  BiPoly x_, y_, w_;
  Rect domain_;
};

/// p(s,t). Throws DenominatorNearZero when |w| < 1e-14 * max|w coeffs|.
Point eval_family(const RationalFamily& f, double s, double t);

/// Evaluates w at (s,t), throwing DenominatorNearZero under the same rule.
double checked_weight(const RationalFamily& f, double s, double t);

/// det [[x, x_s, x_t], [y, y_s, y_t], [w, w_s, w_t]], expanded exactly and
/// trimmed. Its zero set maps onto the envelope; det J = h / w^3.
BiPoly envelope_function(const RationalFamily& f, double trim_tol = kDefaultTrimTolerance);

/// Jacobian determinant of p by central differences of eval_family. Does not
/// use envelope_function, so the two can be cross-checked.
double jacobian_det(const RationalFamily& f, double s, double t, double step = 1e-6);

/// Hex SHA-256 over the coefficient bits and the domain.
std::string fingerprint(const RationalFamily& f);

}  // namespace envimp
