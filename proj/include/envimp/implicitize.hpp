#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <utility>

#include "envimp/bipoly.hpp"
#include "envimp/domain.hpp"
#include "envimp/envelope.hpp"

namespace envimp {

/// Reference triangle carrying the triangular Bernstein basis of q.
struct Triangle {
  std::array<Point, 3> v;

  double signed_area() const;
  double diameter() const;
  /// area > 1e-12 * diameter^2
  bool is_degenerate() const;
  /// Barycentric coordinates (u, v, w) relative to v[0], v[1], v[2].
  /// Throws DegenerateTriangle.
  Eigen::Vector3d barycentric(const Point& p) const;
  /// Affine coefficients A with (u, v, w) = A * (1, x, y).
  Eigen::Matrix3d barycentric_map() const;

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

/// Degree bookkeeping for one approximation problem.
struct ImplicitBasisSpec {
  int degree = 1;  // d, total degree of q
  Triangle triangle;
  int k1 = 0, k2 = 0;  // bidegree of lambda
  Rect lambda_domain;
  int L1 = 0, L2 = 0;  // working bidegree of the residual

  int num_q() const { return (degree + 1) * (degree + 2) / 2; }
  int num_lambda() const { return (k1 + 1) * (k2 + 1); }
};

/// D = (D_q, D_lambda). Row (i*(L2+1) + j) holds the Chebyshev coefficient
/// of T_i T_j; columns 0..M-1 follow the lexicographic beta ordering, the
/// remaining ones the row-major alpha ordering.
struct CollocationMatrix {
  Eigen::MatrixXd D;
  int num_q = 0;
  int num_lambda = 0;
  int L1 = 0, L2 = 0;
  bool row_weighting = true;

  Eigen::Index row_of(int i, int j) const { return static_cast<Eigen::Index>(i) * (L2 + 1) + j; }
  auto D_q() const { return D.leftCols(num_q); }
  auto D_lambda() const { return D.rightCols(num_lambda); }
};

struct SvdSolution {
  double sigma_min = 0.0;
  /// second-smallest over smallest singular value, +inf when sigma_min = 0
  double sigma_gap = 0.0;
  Eigen::VectorXd c;  // unit right singular vector
  /// Zero rows appended because D was wide.
  Eigen::Index padded_rows = 0;
};

struct Timing {
  double assembly_ms = 0.0;
  double svd_ms = 0.0;
};

struct ImplicitApproximation {
  Eigen::VectorXd c_q;       // triangular Bernstein coefficients of q
  Eigen::VectorXd c_lambda;  // tensor Bernstein coefficients of lambda
  double sigma_min = 0.0;
  double sigma_gap = 0.0;
  ImplicitBasisSpec spec;
  Eigen::Index rows = 0, cols = 0;
  Eigen::Index padded_rows = 0;
  bool row_weighting = true;
  std::string family_fingerprint;
  Rect domain;
  Timing timing;
};

struct ImplicitOptions {
  std::optional<std::pair<int, int>> lambda_bidegree;
  std::optional<Triangle> triangle;
  bool row_weighting = true;
  unsigned threads = 0;  // 0: resolve_threads()
};

/// (k1, k2) = (max(0, d n1 - 2 deg_s h), max(0, d n2 - 2 deg_t h)).
std::pair<int, int> lambda_degrees(const RationalFamily& f, const BiPoly& h, int d);
std::pair<int, int> lambda_degrees(const RationalFamily& f, int d);

/// (L1, L2) = (max(d n1, k1 + 2 deg_s h), max(d n2, k2 + 2 deg_t h)).
std::pair<int, int> working_bidegree(const RationalFamily& f, const BiPoly& h, int d, int k1, int k2);

/// Right triangle containing the 10%-padded bounding box of p over a 33x33
/// parameter grid. Throws DegenerateImage if the image is a single point.
Triangle reference_triangle(const RationalFamily& f);

/// beta_ijk = d!/(i! j! k!) u^i v^j w^k in lexicographic (i, j) order.
Eigen::VectorXd triangular_bernstein_eval(int d, const Triangle& tri, const Point& p);

/// Products B_i^k1(u) B_j^k2(v) of univariate Bernstein polynomials over the
/// normalized domain coordinates, row-major in (i, j).
Eigen::VectorXd tensor_bernstein_eval(int k1, int k2, const Rect& domain, double s, double t);

/// Degree formulas plus triangle, with optional overrides.
ImplicitBasisSpec make_basis_spec(const RationalFamily& f, const BiPoly& h, int d,
                                  const ImplicitOptions& options = {});

/// Chebyshev-transforms w^d (beta_k o p) and -h^2 alpha_l on the working
/// grid. With row weighting, row (i, j) is scaled by 2^(-([i>0] + [j>0]) / 2)
/// so that ||Dc||^2 is proportional to the Chebyshev-weighted L2 norm of the
/// residual. Throws DenominatorNearZero if w vanishes at a node.
CollocationMatrix build_D(const RationalFamily& f, const BiPoly& h, const ImplicitBasisSpec& spec,
                          bool row_weighting = true, unsigned threads = 0);
CollocationMatrix build_D(const RationalFamily& f, const ImplicitBasisSpec& spec,
                          bool row_weighting = true, unsigned threads = 0);

/// Smallest singular value and its right singular vector, sign-normalized so
/// the largest-magnitude entry is positive. Throws NumericalFailure.
SvdSolution solve_min(const Eigen::MatrixXd& D);

ImplicitApproximation implicitize(const RationalFamily& f, int d, const ImplicitOptions& options = {});

/// q(point) = c_q . beta(point).
double eval_q(const ImplicitApproximation& a, const Point& point);
/// lambda(s, t) = c_lambda . alpha(s, t).
double eval_lambda(const ImplicitApproximation& a, double s, double t);

}  // namespace envimp
