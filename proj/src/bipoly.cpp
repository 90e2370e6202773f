#include "envimp/bipoly.hpp"

#include <algorithm>
#include <cmath>

#include "envimp/errors.hpp"

namespace envimp {

BiPoly::BiPoly() : coeffs_(Eigen::MatrixXd::Zero(1, 1)) {}

BiPoly::BiPoly(Eigen::MatrixXd coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() < 1 || coeffs_.cols() < 1) {
    throw DimensionMismatch("BiPoly needs at least one coefficient");
  }
}

BiPoly BiPoly::constant(double value) {
  return BiPoly(Eigen::MatrixXd::Constant(1, 1, value));
}

BiPoly BiPoly::zero(int deg_s, int deg_t) {
  return BiPoly(Eigen::MatrixXd::Zero(deg_s + 1, deg_t + 1));
}

BiPoly BiPoly::monomial(int i, int j, double c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(i + 1, j + 1);
  m(i, j) = c;
  return BiPoly(std::move(m));
}

double BiPoly::operator()(double s, double t) const { return eval(*this, s, t); }

double eval(const BiPoly& p, double s, double t) {
  const auto& c = p.coeffs();
  double acc = 0.0;
  for (Eigen::Index i = c.rows() - 1; i >= 0; --i) {
    double row = 0.0;
    for (Eigen::Index j = c.cols() - 1; j >= 0; --j) row = row * t + c(i, j);
    acc = acc * s + row;
  }
  return acc;
}

BiPoly pad_to(const BiPoly& p, int deg_s, int deg_t) {
  if (deg_s < p.deg_s() || deg_t < p.deg_t()) {
    throw DimensionMismatch("pad_to cannot shrink a polynomial");
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(deg_s + 1, deg_t + 1);
  m.topLeftCorner(p.coeffs().rows(), p.coeffs().cols()) = p.coeffs();
  return BiPoly(std::move(m));
}

BiPoly add(const BiPoly& p, const BiPoly& q) {
  const int ms = std::max(p.deg_s(), q.deg_s());
  const int mt = std::max(p.deg_t(), q.deg_t());
  return BiPoly(pad_to(p, ms, mt).coeffs() + pad_to(q, ms, mt).coeffs());
}

BiPoly sub(const BiPoly& p, const BiPoly& q) { return add(p, scale(q, -1.0)); }

BiPoly scale(const BiPoly& p, double factor) { return BiPoly(p.coeffs() * factor); }

namespace {

// Ordering on coefficient matrices by shape, then absolute entries. Using
// magnitudes keeps mul(p, -q) == -mul(p, q) exact as well.
bool operand_less(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  if (a.cols() != b.cols()) return a.cols() < b.cols();
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size(),
                                      [](double x, double y) { return std::abs(x) < std::abs(y); });
}

}  // namespace

BiPoly mul(const BiPoly& p, const BiPoly& q) {
  // Accumulate in a fixed operand order so that p*q and q*p agree bit for bit.
  const bool swap = operand_less(q.coeffs(), p.coeffs());
  const auto& a = swap ? q.coeffs() : p.coeffs();
  const auto& b = swap ? p.coeffs() : q.coeffs();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() + b.rows() - 1, a.cols() + b.cols() - 1);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      out.block(i, j, b.rows(), b.cols()) += aij * b;
    }
  }
  return BiPoly(std::move(out));
}

BiPoly diff(const BiPoly& p, Var var) {
  const auto& c = p.coeffs();
  if (var == Var::S) {
    if (c.rows() == 1) return BiPoly::zero(0, p.deg_t());
    Eigen::MatrixXd out(c.rows() - 1, c.cols());
    for (Eigen::Index i = 1; i < c.rows(); ++i) out.row(i - 1) = static_cast<double>(i) * c.row(i);
    return BiPoly(std::move(out));
  }
  if (c.cols() == 1) return BiPoly::zero(p.deg_s(), 0);
  Eigen::MatrixXd out(c.rows(), c.cols() - 1);
  for (Eigen::Index j = 1; j < c.cols(); ++j) out.col(j - 1) = static_cast<double>(j) * c.col(j);
  return BiPoly(std::move(out));
}

BiPoly degree_trim(const BiPoly& p, double tol) {
  const auto& c = p.coeffs();
  const double cutoff = tol * p.max_abs_coeff();
  if (p.is_zero()) return BiPoly();

  auto rows = c.rows();
  while (rows > 1 && c.row(rows - 1).cwiseAbs().maxCoeff() <= cutoff) --rows;
  auto cols = c.cols();
  while (cols > 1 && c.block(0, cols - 1, rows, 1).cwiseAbs().maxCoeff() <= cutoff) --cols;
  return BiPoly(c.topLeftCorner(rows, cols));
}

}  // namespace envimp
