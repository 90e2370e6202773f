#include "envimp/chebtransform.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "envimp/errors.hpp"

namespace envimp {

namespace {

// FFTW's planner is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double, FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwFree>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

int extended_length(int L) { return L == 0 ? 1 : 2 * L; }

// Mirror index of position k in the even extension of length 2L.
int mirror(int k, int L) { return k <= L ? k : 2 * L - k; }

double clenshaw(const double* c, Eigen::Index n, Eigen::Index stride, double u) {
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    const double b0 = c[k * stride] + 2.0 * u * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + u * b1 - b2;
}

}  // namespace

std::vector<double> cheb_points(int L, const Interval& interval) {
  if (L < 0) throw InvalidInput("Chebyshev degree must be nonnegative");
  if (L == 0) return {interval.mid()};
  std::vector<double> nodes(L + 1);
  for (int j = 0; j <= L; ++j) {
    nodes[j] = interval.from_unit(0.5 * (1.0 - std::cos(j * std::numbers::pi / L)));
  }
  // cos is not exactly +-1 at the ends after rounding; pin the endpoints.
  nodes.front() = interval.lo;
  nodes.back() = interval.hi;
  return nodes;
}

ChebGrid::ChebGrid(int l1, int l2, const Rect& r)
    : L1(l1), L2(l2), region(r), nodes_s(cheb_points(l1, r.s)), nodes_t(cheb_points(l2, r.t)) {}

Eigen::MatrixXd even_extension(const Eigen::MatrixXd& f) {
  const int L1 = static_cast<int>(f.rows()) - 1;
  const int L2 = static_cast<int>(f.cols()) - 1;
  const int n0 = extended_length(L1);
  const int n1 = extended_length(L2);
  Eigen::MatrixXd ext(n0, n1);
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) ext(i, j) = f(mirror(i, L1), mirror(j, L2));
  }
  return ext;
}

Eigen::MatrixXcd fourier_2d(const Eigen::MatrixXd& values) {
  const int n0 = static_cast<int>(values.rows());
  const int n1 = static_cast<int>(values.cols());
  const int half = n1 / 2 + 1;
  auto in = alloc_real(static_cast<std::size_t>(n0) * n1);
  auto out = alloc_complex(static_cast<std::size_t>(n0) * half);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_2d(n0, n1, in.get(), out.get(), FFTW_ESTIMATE);
  }
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) in.get()[i * n1 + j] = values(i, j);
  }
  fftw_execute(plan);
  Eigen::MatrixXcd spectrum(n0, half);
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < half; ++j) {
      const fftw_complex& z = out.get()[i * half + j];
      spectrum(i, j) = {z[0], z[1]};
    }
  }
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
  return spectrum;
}

struct ChebTransformer::Plan {
  fftw_plan plan = nullptr;
  int n0 = 1, n1 = 1;
};

ChebTransformer::ChebTransformer(int L1, int L2) : L1_(L1), L2_(L2), plan_(std::make_unique<Plan>()) {
  if (L1 < 0 || L2 < 0) throw InvalidInput("Chebyshev degrees must be nonnegative");
  plan_->n0 = extended_length(L1);
  plan_->n1 = extended_length(L2);
  const int half = plan_->n1 / 2 + 1;
  auto in = alloc_real(static_cast<std::size_t>(plan_->n0) * plan_->n1);
  auto out = alloc_complex(static_cast<std::size_t>(plan_->n0) * half);
  std::lock_guard lock(planner_mutex());
  plan_->plan = fftw_plan_dft_r2c_2d(plan_->n0, plan_->n1, in.get(), out.get(), FFTW_ESTIMATE);
  if (plan_->plan == nullptr) throw NumericalFailure("FFTW planning failed");
}

ChebTransformer::~ChebTransformer() {
  if (plan_ && plan_->plan != nullptr) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_->plan);
  }
}

Eigen::MatrixXd ChebTransformer::transform(const Eigen::MatrixXd& samples) const {
  if (samples.rows() != L1_ + 1 || samples.cols() != L2_ + 1) {
    throw DimensionMismatch("sample matrix is " + std::to_string(samples.rows()) + "x" +
                            std::to_string(samples.cols()) + ", grid expects " +
                            std::to_string(L1_ + 1) + "x" + std::to_string(L2_ + 1));
  }
  const int n0 = plan_->n0;
  const int n1 = plan_->n1;
  const int half = n1 / 2 + 1;
  auto in = alloc_real(static_cast<std::size_t>(n0) * n1);
  auto out = alloc_complex(static_cast<std::size_t>(n0) * half);
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) in.get()[i * n1 + j] = samples(mirror(i, L1_), mirror(j, L2_));
  }
  fftw_execute_dft_r2c(plan_->plan, in.get(), out.get());

  // Scale so the coefficients interpolate the samples: 1/L per dimension,
  // an extra 1/2 on the first and last index. The nodes run from -1 to +1
  // (reverse of cos(j pi / L)), which flips the sign of odd-degree terms.
  const double scale_s = L1_ == 0 ? 1.0 : static_cast<double>(L1_);
  const double scale_t = L2_ == 0 ? 1.0 : static_cast<double>(L2_);
  Eigen::MatrixXd g(L1_ + 1, L2_ + 1);
  for (int i = 0; i <= L1_; ++i) {
    double fi = 1.0 / scale_s;
    if (L1_ > 0 && (i == 0 || i == L1_)) fi *= 0.5;
    if (i % 2 == 1) fi = -fi;
    for (int j = 0; j <= L2_; ++j) {
      double fj = 1.0 / scale_t;
      if (L2_ > 0 && (j == 0 || j == L2_)) fj *= 0.5;
      if (j % 2 == 1) fj = -fj;
      g(i, j) = out.get()[i * half + j][0] * fi * fj;
    }
  }
  return g;
}

ChebCoeffs cheb_transform_2d(const Eigen::MatrixXd& samples, const ChebGrid& grid) {
  const ChebTransformer transformer(grid.L1, grid.L2);
  return {transformer.transform(samples), grid.region};
}

double cheb_eval_2d(const ChebCoeffs& c, double s, double t) {
  const double us = 2.0 * c.region.s.to_unit(s) - 1.0;
  const double ut = 2.0 * c.region.t.to_unit(t) - 1.0;
  const Eigen::Index rows = c.coeffs.rows();
  const Eigen::Index cols = c.coeffs.cols();
  Eigen::VectorXd row_values(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    // Column-major storage: stride between (i, j) and (i, j+1) is `rows`.
    row_values[i] = clenshaw(c.coeffs.data() + i, cols, rows, ut);
  }
  return clenshaw(row_values.data(), rows, 1, us);
}

}  // namespace envimp
