#pragma once

// Test families and independent oracles shared by the unit and acceptance
// suites. Nothing here goes through the FFT path.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>

#include "envimp/bipoly.hpp"
#include "envimp/envelope.hpp"
#include "envimp/implicitize.hpp"

namespace envimp::testing {

inline BiPoly poly(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Eigen::MatrixXd m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return BiPoly(std::move(m));
}

inline const Rect kUnitSquare{{0.0, 1.0}, {0.0, 1.0}};

/// Tangent lines of the polynomial curve (a(s), b(s)): c(s) + t c'(s).
/// Coefficients are in ascending powers of s.
inline RationalFamily tangent_family(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Rect& domain) {
  const Eigen::Index n = std::max(a.size(), b.size());
  auto lift = [n](const Eigen::VectorXd& c) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, 2);
    for (Eigen::Index i = 0; i < c.size(); ++i) m(i, 0) = c[i];
    for (Eigen::Index i = 1; i < c.size(); ++i) m(i - 1, 1) += static_cast<double>(i) * c[i];
    return BiPoly(std::move(m));
  };
  return RationalFamily(lift(a), lift(b), BiPoly::constant(1.0), domain);
}

/// x = s + t, y = s^2 + 2ts, w = 1; h = -2t, envelope y = x^2.
inline RationalFamily parabola_family(const Rect& domain = kUnitSquare) {
  return RationalFamily(poly({{0, 1}, {1, 0}}), poly({{0, 0}, {0, 2}, {1, 0}}), BiPoly::constant(1.0), domain);
}

/// x = s^2 + 2ts, y = s^3 + 3ts^2, w = 1; h = -6 t s^2 (improper factor s^2).
inline RationalFamily cusp_family(const Rect& domain = kUnitSquare) {
  return RationalFamily(poly({{0, 0}, {0, 2}, {1, 0}}), poly({{0, 0}, {0, 0}, {0, 3}, {1, 0}}),
                        BiPoly::constant(1.0), domain);
}

/// x = s^2 + 2t, y = s^3 + 3ts, w = 1; same tangent lines of (s^2, s^3)
/// with direction c'(s)/s, so h = -6t.
inline RationalFamily reduced_cusp_family(const Rect& domain = kUnitSquare) {
  return RationalFamily(poly({{0, 2}, {0, 0}, {1, 0}}), poly({{0, 0}, {0, 3}, {0, 0}, {1, 0}}),
                        BiPoly::constant(1.0), domain);
}

/// Tangents of c(s) = (s, s^k); envelope y = x^k has implicit degree k.
inline RationalFamily power_tangent_family(int k, const Rect& domain) {
  Eigen::VectorXd a(2), b = Eigen::VectorXd::Zero(k + 1);
  a << 0.0, 1.0;
  b[k] = 1.0;
  return tangent_family(a, b, domain);
}

inline const Rect kQuinticDomain{{0.5, 1.5}, {-0.5, 0.5}};

inline BiPoly random_poly(std::mt19937_64& rng, int m, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd c(m + 1, n + 1);
  for (Eigen::Index k = 0; k < c.size(); ++k) c.data()[k] = u(rng);
  return BiPoly(std::move(c));
}

/// Random family on the unit square with w bounded away from zero.
inline RationalFamily random_family(std::mt19937_64& rng, int m, int n) {
  BiPoly w = random_poly(rng, m, n, 0.1);
  Eigen::MatrixXd wc = w.coeffs();
  wc(0, 0) = 3.0;
  return RationalFamily(random_poly(rng, m, n), random_poly(rng, m, n), BiPoly(wc), kUnitSquare);
}

inline double cheb_T(int k, double u) { return std::cos(k * std::acos(std::clamp(u, -1.0, 1.0))); }

/// Chebyshev coefficients by solving the dense interpolation system
/// sum_ij c_ij T_i(u_a) T_j(v_b) = samples(a, b) at the grid nodes.
inline Eigen::MatrixXd dense_cheb_coeffs(const Eigen::MatrixXd& samples) {
  const int L1 = static_cast<int>(samples.rows()) - 1;
  const int L2 = static_cast<int>(samples.cols()) - 1;
  const int n = (L1 + 1) * (L2 + 1);
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd rhs(n);
  for (int a = 0; a <= L1; ++a) {
    const double u = L1 == 0 ? 0.0 : -std::cos(a * std::numbers::pi / L1);
    for (int b = 0; b <= L2; ++b) {
      const double v = L2 == 0 ? 0.0 : -std::cos(b * std::numbers::pi / L2);
      const int row = a * (L2 + 1) + b;
      rhs[row] = samples(a, b);
      for (int i = 0; i <= L1; ++i) {
        for (int j = 0; j <= L2; ++j) A(row, i * (L2 + 1) + j) = cheb_T(i, u) * cheb_T(j, v);
      }
    }
  }
  const Eigen::VectorXd c = A.fullPivLu().solve(rhs);
  Eigen::MatrixXd out(L1 + 1, L2 + 1);
  for (int i = 0; i <= L1; ++i) {
    for (int j = 0; j <= L2; ++j) out(i, j) = c[i * (L2 + 1) + j];
  }
  return out;
}

/// Residual (q o p) w^d - lambda h^2 for the coefficient vector c = (c_q, c_lambda),
/// evaluated pointwise.
inline double residual(const RationalFamily& f, const BiPoly& h, const ImplicitBasisSpec& spec,
                       const Eigen::VectorXd& c, double s, double t) {
  const double w = eval(f.w(), s, t);
  const Point p(eval(f.x(), s, t) / w, eval(f.y(), s, t) / w);
  const double q = c.head(spec.num_q()).dot(triangular_bernstein_eval(spec.degree, spec.triangle, p));
  const double lambda = c.tail(spec.num_lambda()).dot(
      tensor_bernstein_eval(spec.k1, spec.k2, spec.lambda_domain, s, t));
  const double hv = eval(h, s, t);
  return q * std::pow(w, spec.degree) - lambda * hv * hv;
}

/// Gauss-Chebyshev quadrature of omega * residual^2 over the family domain
/// with n nodes per direction, omega the tensor Chebyshev weight of the
/// domain mapped to [-1, 1]^2 (integration in the original s, t measure).
inline double weighted_residual_integral(const RationalFamily& f, const BiPoly& h, const ImplicitBasisSpec& spec,
                                         const Eigen::VectorXd& c, int n) {
  const Rect& dom = f.domain();
  double sum = 0.0;
  for (int a = 1; a <= n; ++a) {
    const double u = std::cos((2.0 * a - 1.0) * std::numbers::pi / (2.0 * n));
    const double s = dom.s.from_unit(0.5 * (u + 1.0));
    for (int b = 1; b <= n; ++b) {
      const double v = std::cos((2.0 * b - 1.0) * std::numbers::pi / (2.0 * n));
      const double t = dom.t.from_unit(0.5 * (v + 1.0));
      const double r = residual(f, h, spec, c, s, t);
      sum += r * r;
    }
  }
  const double w = std::numbers::pi / n;
  return sum * w * w * (0.5 * dom.s.length()) * (0.5 * dom.t.length());
}

/// The fixed constant relating the weighted integral to ||Dc||^2 with row
/// weighting on: pi^2 |I| |J| / 4.
inline double weighted_norm_constant(const Rect& dom) {
  return std::numbers::pi * std::numbers::pi * dom.s.length() * dom.t.length() / 4.0;
}

/// Coefficients of y - x^2 in the triangular Bernstein basis of `tri`, found
/// by interpolation at the degree-2 domain points (independent of D).
inline Eigen::VectorXd bernstein_coeffs_of(int d, const Triangle& tri, double (*q)(const Point&)) {
  const int M = (d + 1) * (d + 2) / 2;
  Eigen::MatrixXd A(M, M);
  Eigen::VectorXd rhs(M);
  int row = 0;
  for (int i = 0; i <= d; ++i) {
    for (int j = 0; j <= d - i; ++j) {
      const int k = d - i - j;
      const Point p = (i * tri.v[0] + j * tri.v[1] + k * tri.v[2]) / d;
      A.row(row) = triangular_bernstein_eval(d, tri, p).transpose();
      rhs[row] = q(p);
      ++row;
    }
  }
  return A.fullPivLu().solve(rhs);
}

}  // namespace envimp::testing
