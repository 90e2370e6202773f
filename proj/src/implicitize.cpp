#include "envimp/implicitize.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "envimp/chebtransform.hpp"
#include "envimp/errors.hpp"
#include "envimp/parallel.hpp"

namespace envimp {

namespace {

constexpr int kTriangleSampleGrid = 33;
constexpr double kTrianglePad = 0.1;
constexpr double kMinPad = 1e-6;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

// Row k of Pascal's triangle as doubles.
std::vector<double> binomials(int k) {
  std::vector<double> c(k + 1, 1.0);
  for (int i = 1; i < k; ++i) {
    for (int j = i; j >= 1; --j) c[j] += c[j - 1];
  }
  return c;
}

std::vector<double> powers(double x, int n) {
  std::vector<double> p(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) p[i] = p[i - 1] * x;
  return p;
}

// Triangular Bernstein values from barycentric coordinates (possibly scaled
// by a common homogeneous factor, which then appears to the d-th power).
void bernstein_from_barycentric(int d, double u, double v, double w, double* out) {
  const auto pu = powers(u, d);
  const auto pv = powers(v, d);
  const auto pw = powers(w, d);
  const auto cd = binomials(d);
  int k = 0;
  for (int i = 0; i <= d; ++i) {
    const auto ci = binomials(d - i);
    for (int j = 0; j <= d - i; ++j) out[k++] = cd[i] * ci[j] * pu[i] * pv[j] * pw[d - i - j];
  }
}

void univariate_bernstein(int k, double u, double* out) {
  const auto c = binomials(k);
  const auto pu = powers(u, k);
  const auto pv = powers(1.0 - u, k);
  for (int i = 0; i <= k; ++i) out[i] = c[i] * pu[i] * pv[k - i];
}

}  // namespace

// ---------------------------------------------------------------------------
// Triangle

double Triangle::signed_area() const {
  const Point a = v[1] - v[0];
  const Point b = v[2] - v[0];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Triangle::diameter() const {
  return std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()});
}

bool Triangle::is_degenerate() const {
  const double diam = diameter();
  return !(std::abs(signed_area()) > 1e-12 * diam * diam);
}

Eigen::Matrix3d Triangle::barycentric_map() const {
  if (is_degenerate()) throw DegenerateTriangle("reference triangle is degenerate");
  Eigen::Matrix3d m;
  m << 1.0, 1.0, 1.0,  //
      v[0].x(), v[1].x(), v[2].x(),  //
      v[0].y(), v[1].y(), v[2].y();
  return m.inverse();
}

Eigen::Vector3d Triangle::barycentric(const Point& p) const {
  return barycentric_map() * Eigen::Vector3d(1.0, p.x(), p.y());
}

// ---------------------------------------------------------------------------
// Degree formulas and bases

std::pair<int, int> lambda_degrees(const RationalFamily& f, const BiPoly& h, int d) {
  if (d < 1) throw InvalidInput("degree must be >= 1");
  return {std::max(0, d * f.n1() - 2 * h.deg_s()), std::max(0, d * f.n2() - 2 * h.deg_t())};
}

std::pair<int, int> lambda_degrees(const RationalFamily& f, int d) {
  return lambda_degrees(f, envelope_function(f), d);
}

std::pair<int, int> working_bidegree(const RationalFamily& f, const BiPoly& h, int d, int k1, int k2) {
  return {std::max(d * f.n1(), k1 + 2 * h.deg_s()), std::max(d * f.n2(), k2 + 2 * h.deg_t())};
}

Triangle reference_triangle(const RationalFamily& f) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (int i = 0; i < kTriangleSampleGrid; ++i) {
    const double s = f.domain().s.from_unit(static_cast<double>(i) / (kTriangleSampleGrid - 1));
    for (int j = 0; j < kTriangleSampleGrid; ++j) {
      const double t = f.domain().t.from_unit(static_cast<double>(j) / (kTriangleSampleGrid - 1));
      const Point p = eval_family(f, s, t);
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
  }
  if (xmax - xmin == 0.0 && ymax - ymin == 0.0) {
    throw DegenerateImage("the family maps the whole domain to a single point");
  }
  const double pad_x = std::max(kTrianglePad * (xmax - xmin), kMinPad);
  const double pad_y = std::max(kTrianglePad * (ymax - ymin), kMinPad);
  const double x0 = xmin - pad_x, y0 = ymin - pad_y;
  const double width = xmax - xmin + 2.0 * pad_x;
  const double height = ymax - ymin + 2.0 * pad_y;
  return Triangle{{Point(x0, y0), Point(x0 + 2.0 * width, y0), Point(x0, y0 + 2.0 * height)}};
}

Eigen::VectorXd triangular_bernstein_eval(int d, const Triangle& tri, const Point& p) {
  const Eigen::Vector3d b = tri.barycentric(p);
  Eigen::VectorXd out((d + 1) * (d + 2) / 2);
  bernstein_from_barycentric(d, b[0], b[1], b[2], out.data());
  return out;
}

Eigen::VectorXd tensor_bernstein_eval(int k1, int k2, const Rect& domain, double s, double t) {
  std::vector<double> bs(k1 + 1), bt(k2 + 1);
  univariate_bernstein(k1, domain.s.to_unit(s), bs.data());
  univariate_bernstein(k2, domain.t.to_unit(t), bt.data());
  Eigen::VectorXd out((k1 + 1) * (k2 + 1));
  for (int i = 0; i <= k1; ++i) {
    for (int j = 0; j <= k2; ++j) out[i * (k2 + 1) + j] = bs[i] * bt[j];
  }
  return out;
}

ImplicitBasisSpec make_basis_spec(const RationalFamily& f, const BiPoly& h, int d,
                                  const ImplicitOptions& options) {
  if (d < 1) throw InvalidInput("degree must be >= 1");
  ImplicitBasisSpec spec;
  spec.degree = d;
  std::tie(spec.k1, spec.k2) = options.lambda_bidegree.value_or(lambda_degrees(f, h, d));
  if (spec.k1 < 0 || spec.k2 < 0) throw InvalidInput("lambda bidegree must be nonnegative");
  spec.lambda_domain = f.domain();
  std::tie(spec.L1, spec.L2) = working_bidegree(f, h, d, spec.k1, spec.k2);
  spec.triangle = options.triangle.value_or(reference_triangle(f));
  if (spec.triangle.is_degenerate()) throw DegenerateTriangle("reference triangle is degenerate");
  return spec;
}

// ---------------------------------------------------------------------------
// Assembly and solve

CollocationMatrix build_D(const RationalFamily& f, const BiPoly& h, const ImplicitBasisSpec& spec,
                          bool row_weighting, unsigned threads) {
  const int d = spec.degree;
  const int M = spec.num_q();
  const int K = spec.num_lambda();
  const ChebGrid grid(spec.L1, spec.L2, f.domain());
  const Eigen::Matrix3d bary = spec.triangle.barycentric_map();
  const unsigned workers = resolve_threads(threads);

  // One sample matrix per basis function; each grid row is filled by one task.
  std::vector<Eigen::MatrixXd> samples(M + K, Eigen::MatrixXd(grid.rows(), grid.cols()));
  parallel_for(static_cast<std::size_t>(grid.rows()), workers, [&](std::size_t a) {
    std::vector<double> beta(M);
    const double s = grid.nodes_s[a];
    for (Eigen::Index b = 0; b < grid.cols(); ++b) {
      const double t = grid.nodes_t[b];
      const double wv = checked_weight(f, s, t);
      // w * (u, v, w_bary) evaluated at p = (x/w, y/w) is linear in (w, x, y),
      // so w^d beta_k(p) needs no division.
      const Eigen::Vector3d hom = bary * Eigen::Vector3d(wv, eval(f.x(), s, t), eval(f.y(), s, t));
      bernstein_from_barycentric(d, hom[0], hom[1], hom[2], beta.data());
      for (int k = 0; k < M; ++k) samples[k](a, b) = beta[k];

      const double hv = eval(h, s, t);
      const Eigen::VectorXd alpha = tensor_bernstein_eval(spec.k1, spec.k2, spec.lambda_domain, s, t);
      for (int l = 0; l < K; ++l) samples[M + l](a, b) = -hv * hv * alpha[l];
    }
  });

  CollocationMatrix out;
  out.num_q = M;
  out.num_lambda = K;
  out.L1 = spec.L1;
  out.L2 = spec.L2;
  out.row_weighting = row_weighting;
  out.D.resize(grid.rows() * grid.cols(), M + K);

  const ChebTransformer transformer(spec.L1, spec.L2);
  parallel_for(samples.size(), workers, [&](std::size_t col) {
    const Eigen::MatrixXd g = transformer.transform(samples[col]);
    for (int i = 0; i <= spec.L1; ++i) {
      for (int j = 0; j <= spec.L2; ++j) out.D(out.row_of(i, j), static_cast<Eigen::Index>(col)) = g(i, j);
    }
  });

  if (row_weighting) {
    const double half_weight = std::sqrt(0.5);
    for (int i = 0; i <= spec.L1; ++i) {
      for (int j = 0; j <= spec.L2; ++j) {
        double wgt = 1.0;
        if (i > 0) wgt *= half_weight;
        if (j > 0) wgt *= half_weight;
        out.D.row(out.row_of(i, j)) *= wgt;
      }
    }
  }
  return out;
}

CollocationMatrix build_D(const RationalFamily& f, const ImplicitBasisSpec& spec, bool row_weighting,
                          unsigned threads) {
  return build_D(f, envelope_function(f), spec, row_weighting, threads);
}

SvdSolution solve_min(const Eigen::MatrixXd& D) {
  if (D.cols() == 0) throw InvalidInput("matrix has no columns");
  if (!D.allFinite()) throw NumericalFailure("matrix has non-finite entries");

  SvdSolution sol;
  Eigen::MatrixXd A = D;
  if (A.rows() < A.cols()) {
    sol.padded_rows = A.cols() - A.rows();
    A.conservativeResize(A.cols(), Eigen::NoChange);
    A.bottomRows(sol.padded_rows).setZero();
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("SVD did not converge");
  const Eigen::VectorXd& sigma = svd.singularValues();  // descending
  const Eigen::Index n = sigma.size();
  if (!sigma.allFinite()) throw NumericalFailure("SVD produced non-finite singular values");

  sol.sigma_min = sigma[n - 1];
  if (n < 2 || sol.sigma_min == 0.0) {
    sol.sigma_gap = std::numeric_limits<double>::infinity();
  } else {
    sol.sigma_gap = sigma[n - 2] / sol.sigma_min;
  }
  sol.c = svd.matrixV().col(n - 1);
  Eigen::Index imax = 0;
  sol.c.cwiseAbs().maxCoeff(&imax);
  if (sol.c[imax] < 0.0) sol.c = -sol.c;
  return sol;
}

ImplicitApproximation implicitize(const RationalFamily& f, int d, const ImplicitOptions& options) {
  if (d < 1) throw InvalidInput("degree must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const BiPoly h = envelope_function(f);
  const ImplicitBasisSpec spec = make_basis_spec(f, h, d, options);
  const CollocationMatrix D = build_D(f, h, spec, options.row_weighting, options.threads);

  ImplicitApproximation out;
  out.timing.assembly_ms = elapsed_ms(start);
  const auto svd_start = std::chrono::steady_clock::now();
  const SvdSolution sol = solve_min(D.D);
  out.timing.svd_ms = elapsed_ms(svd_start);

  out.c_q = sol.c.head(D.num_q);
  out.c_lambda = sol.c.tail(D.num_lambda);
  out.sigma_min = sol.sigma_min;
  out.sigma_gap = sol.sigma_gap;
  out.spec = spec;
  out.rows = D.D.rows();
  out.cols = D.D.cols();
  out.padded_rows = sol.padded_rows;
  out.row_weighting = options.row_weighting;
  out.family_fingerprint = fingerprint(f);
  out.domain = f.domain();
  return out;
}

double eval_q(const ImplicitApproximation& a, const Point& point) {
  return a.c_q.dot(triangular_bernstein_eval(a.spec.degree, a.spec.triangle, point));
}

double eval_lambda(const ImplicitApproximation& a, double s, double t) {
  return a.c_lambda.dot(tensor_bernstein_eval(a.spec.k1, a.spec.k2, a.spec.lambda_domain, s, t));
}

}  // namespace envimp
