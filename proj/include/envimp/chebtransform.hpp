#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <vector>

#include "envimp/domain.hpp"

namespace envimp {

/// Chebyshev extremal nodes (1 - cos(j pi / L)) / 2, j = 0..L, mapped affinely
/// into `interval`. Increasing, and hitting both endpoints for L >= 1. L = 0
/// yields the midpoint alone.
std::vector<double> cheb_points(int L, const Interval& interval);

/// Tensor grid of Chebyshev nodes over a rectangle.
struct ChebGrid {
  int L1 = 0;
  int L2 = 0;
  Rect region;
  std::vector<double> nodes_s;
  std::vector<double> nodes_t;

  ChebGrid() = default;
  ChebGrid(int L1, int L2, const Rect& region);

  Eigen::Index rows() const { return L1 + 1; }
  Eigen::Index cols() const { return L2 + 1; }
};

/// Tensor Chebyshev expansion sum c(i,j) T_i(u(s)) T_j(u(t)), where u maps
/// each interval of `region` onto [-1, 1].
struct ChebCoeffs {
  Eigen::MatrixXd coeffs;
  Rect region;

  int L1() const { return static_cast<int>(coeffs.rows()) - 1; }
  int L2() const { return static_cast<int>(coeffs.cols()) - 1; }
};

/// Even (mirror) extension of an (L1+1) x (L2+1) sample matrix to
/// 2 L1 x 2 L2. A dimension with L = 0 is left at length 1.
Eigen::MatrixXd even_extension(const Eigen::MatrixXd& samples);

/// Half-spectrum (r2c) 2-D DFT of a real matrix: rows x (cols/2 + 1).
Eigen::MatrixXcd fourier_2d(const Eigen::MatrixXd& values);

/// Reusable sample-to-coefficient transform for one grid shape.
///
/// Holds an FFTW plan; transform() may be called concurrently from several
/// threads, and always yields bit-identical results for identical input.
class ChebTransformer {
public:
  ChebTransformer(int L1, int L2);
  ~ChebTransformer();
  ChebTransformer(const ChebTransformer&) = delete;
  ChebTransformer& operator=(const ChebTransformer&) = delete;

  int L1() const { return L1_; }
  int L2() const { return L2_; }

  /// Interpolation coefficients of samples taken on the (L1, L2) grid.
  /// Throws DimensionMismatch when the shape is wrong.
  Eigen::MatrixXd transform(const Eigen::MatrixXd& samples) const;

private:
  struct Plan;
  int L1_, L2_;
  std::unique_ptr<Plan> plan_;
};

/// One-shot transform of samples on `grid`.
ChebCoeffs cheb_transform_2d(const Eigen::MatrixXd& samples, const ChebGrid& grid);

/// Clenshaw evaluation in t for every row, then in s.
double cheb_eval_2d(const ChebCoeffs& c, double s, double t);

}  // namespace envimp
