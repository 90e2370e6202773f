#pragma once

#include <Eigen/Dense>

#include <utility>

namespace envimp {

enum class Var { S, T };

inline constexpr double kDefaultTrimTolerance = 1e-12;

/// Bivariate polynomial in the tensor power basis.
///
/// Entry (i, j) of the coefficient matrix multiplies s^i t^j, so a matrix of
/// shape (m+1) x (n+1) stores a polynomial of bidegree (m, n). The bidegree is
/// the shape, not the position of the last nonzero; use degree_trim to make
/// them agree.
class BiPoly {
public:
  BiPoly();  // zero polynomial, bidegree (0, 0)
  explicit BiPoly(Eigen::MatrixXd coeffs);

  static BiPoly constant(double value);
  static BiPoly zero(int deg_s, int deg_t);
  /// c * s^i * t^j
  static BiPoly monomial(int i, int j, double c = 1.0);

  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  int deg_s() const { return static_cast<int>(coeffs_.rows()) - 1; }
  int deg_t() const { return static_cast<int>(coeffs_.cols()) - 1; }
  std::pair<int, int> bidegree() const { return {deg_s(), deg_t()}; }

  double max_abs_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }
  bool is_zero() const { return max_abs_coeff() == 0.0; }

  double operator()(double s, double t) const;

private:
  Eigen::MatrixXd coeffs_;
};

/// Nested Horner: inner recurrence in t, outer in s.
double eval(const BiPoly& p, double s, double t);

BiPoly add(const BiPoly& p, const BiPoly& q);
BiPoly sub(const BiPoly& p, const BiPoly& q);
BiPoly scale(const BiPoly& p, double factor);
/// 2-D discrete convolution of the coefficient matrices.
BiPoly mul(const BiPoly& p, const BiPoly& q);
BiPoly diff(const BiPoly& p, Var var);

/// Drops trailing rows/columns whose entries are all <= tol * max|coeffs|.
/// The zero polynomial trims to a single zero entry.
BiPoly degree_trim(const BiPoly& p, double tol = kDefaultTrimTolerance);

/// Zero-pads p to bidegree (deg_s, deg_t); both must be >= the current ones.
BiPoly pad_to(const BiPoly& p, int deg_s, int deg_t);

inline BiPoly operator+(const BiPoly& p, const BiPoly& q) { return add(p, q); }
inline BiPoly operator-(const BiPoly& p, const BiPoly& q) { return sub(p, q); }
inline BiPoly operator*(const BiPoly& p, const BiPoly& q) { return mul(p, q); }
inline BiPoly operator*(double c, const BiPoly& p) { return scale(p, c); }

}  // namespace envimp
