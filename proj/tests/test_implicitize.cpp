#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "envimp/chebtransform.hpp"
#include "envimp/errors.hpp"
#include "envimp/implicitize.hpp"
#include "test_support.hpp"

using namespace envimp;
using namespace envimp::testing;

namespace {

double parabola_q(const Point& p) { return p.y() - p.x() * p.x(); }

// p(a_s * s + b_s, a_t * t + b_t)
BiPoly compose_affine(const BiPoly& p, double a_s, double b_s, double a_t, double b_t) {
  const BiPoly ls = poly({{b_s}, {a_s}});
  const BiPoly lt = poly({{b_t, a_t}});
  BiPoly out = BiPoly::constant(0.0);
  BiPoly spow = BiPoly::constant(1.0);
  for (int i = 0; i <= p.deg_s(); ++i) {
    BiPoly tpow = BiPoly::constant(1.0);
    for (int j = 0; j <= p.deg_t(); ++j) {
      out = out + p.coeffs()(i, j) * (spow * tpow);
      tpow = tpow * lt;
    }
    spow = spow * ls;
  }
  return out;
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = g(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("lambda_degrees") {
  const RationalFamily par = parabola_family();
  CHECK(lambda_degrees(par, 2) == std::pair{4, 0});
  CHECK(lambda_degrees(par, 1) == std::pair{2, 0});
  // cusp family: n = (3, 1), deg h = (2, 1); d n1 - 2 deg_s h = 3 - 4 < 0
  CHECK(lambda_degrees(cusp_family(), 1) == std::pair{0, 0});
  CHECK_THROWS_AS(lambda_degrees(par, 0), InvalidInput);
}

TEST_CASE("working_bidegree") {
  const RationalFamily par = parabola_family();
  const BiPoly h = envelope_function(par);
  CHECK(working_bidegree(par, h, 2, 4, 0) == std::pair{4, 2});
  // max(1*1, 0 + 2*1) = 2 in t
  CHECK(working_bidegree(par, h, 1, 2, 0) == std::pair{2, 2});

  // x = s, y = t: h = 1, so the first branch of each max wins
  const RationalFamily id(BiPoly::monomial(1, 0), BiPoly::monomial(0, 1), BiPoly::constant(1.0), kUnitSquare);
  const BiPoly hid = envelope_function(id);
  CHECK(hid.bidegree() == std::pair{0, 0});
  CHECK(working_bidegree(id, hid, 3, 0, 0) == std::pair{3, 3});
}

TEST_CASE("reference_triangle") {
  const RationalFamily id(BiPoly::monomial(1, 0), BiPoly::monomial(0, 1), BiPoly::constant(1.0), kUnitSquare);
  const Triangle tri = reference_triangle(id);
  CHECK(tri.v[0].x() == doctest::Approx(-0.1));
  CHECK(tri.v[0].y() == doctest::Approx(-0.1));
  CHECK(tri.v[1].x() == doctest::Approx(2.3));
  CHECK(tri.v[1].y() == doctest::Approx(-0.1));
  CHECK(tri.v[2].x() == doctest::Approx(-0.1));
  CHECK(tri.v[2].y() == doctest::Approx(2.3));

  SUBCASE("translation equivariance") {
    const RationalFamily par = parabola_family();
    const double a = 3.0, b = -1.25;
    const RationalFamily moved(par.x() + a * par.w(), par.y() + b * par.w(), par.w(), par.domain());
    const Triangle t0 = reference_triangle(par), t1 = reference_triangle(moved);
    for (int k = 0; k < 3; ++k) {
      CHECK(t1.v[k].x() == doctest::Approx(t0.v[k].x() + a));
      CHECK(t1.v[k].y() == doctest::Approx(t0.v[k].y() + b));
    }
  }
  SUBCASE("contains the sampled image") {
    std::mt19937_64 rng(12);
    const RationalFamily f = random_family(rng, 3, 2);
    const Triangle t = reference_triangle(f);
    for (int i = 0; i <= 32; ++i) {
      for (int j = 0; j <= 32; ++j) {
        const Eigen::Vector3d b = t.barycentric(eval_family(f, i / 32.0, j / 32.0));
        CHECK(b.minCoeff() >= 0.0);
        CHECK(b.maxCoeff() <= 1.0);
      }
    }
  }
  SUBCASE("degenerate image") {
    const RationalFamily pt(BiPoly::constant(1.0), BiPoly::constant(2.0), BiPoly::constant(1.0), kUnitSquare);
    CHECK_THROWS_AS(reference_triangle(pt), DegenerateImage);
  }
}

TEST_CASE("triangular_bernstein_eval") {
  const Triangle tri{{Point(0, 0), Point(2, 0), Point(0, 1)}};
  // order (i, j) = (0,0), (0,1), (1,0): w, v, u
  CHECK(triangular_bernstein_eval(1, tri, tri.v[0]).isApprox(Eigen::Vector3d(0, 0, 1)));
  CHECK(triangular_bernstein_eval(1, tri, tri.v[1]).isApprox(Eigen::Vector3d(0, 1, 0)));
  CHECK(triangular_bernstein_eval(1, tri, tri.v[2]).isApprox(Eigen::Vector3d(1, 0, 0)));

  const Point centroid = (tri.v[0] + tri.v[1] + tri.v[2]) / 3.0;
  Eigen::VectorXd expect(6);
  expect << 1.0 / 9, 2.0 / 9, 1.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9;
  CHECK((triangular_bernstein_eval(2, tri, centroid) - expect).cwiseAbs().maxCoeff() < 1e-15);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 3.0);
  for (int d = 1; d <= 7; ++d) {
    const Eigen::VectorXd b = triangular_bernstein_eval(d, tri, Point(u(rng), u(rng)));
    CHECK(b.size() == (d + 1) * (d + 2) / 2);
    CHECK(b.sum() == doctest::Approx(1.0));
  }

  const Triangle flat{{Point(0, 0), Point(1, 1), Point(2, 2)}};
  CHECK(flat.is_degenerate());
  CHECK_THROWS_AS(triangular_bernstein_eval(2, flat, Point(0, 0)), DegenerateTriangle);
}

TEST_CASE("tensor_bernstein_eval") {
  const Rect dom{{1, 3}, {-1, 1}};
  CHECK(tensor_bernstein_eval(0, 0, dom, 1.7, 0.2) == Eigen::VectorXd::Ones(1));
  CHECK(tensor_bernstein_eval(1, 1, dom, 2.0, 0.0).isApprox(Eigen::Vector4d::Constant(0.25)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> us(1, 3), ut(-1, 1);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd b = tensor_bernstein_eval(4, 2, dom, us(rng), ut(rng));
    CHECK(b.size() == 15);
    CHECK(b.sum() == doctest::Approx(1.0));
  }
  // corner (s, t) = (lo, hi) is alpha_{0, k2}
  const Eigen::VectorXd corner = tensor_bernstein_eval(2, 3, dom, 1.0, 1.0);
  CHECK(corner[3] == 1.0);
}

TEST_CASE("build_D on the parabola family") {
  const RationalFamily f = parabola_family();
  const BiPoly h = envelope_function(f);
  const ImplicitBasisSpec spec = make_basis_spec(f, h, 2);
  const CollocationMatrix D = build_D(f, h, spec);
  CHECK(D.D.rows() == 15);
  CHECK(D.D.cols() == 11);

  // q = y - x^2 and lambda = -1/4: (q o p) w^2 - lambda h^2 = -t^2 + t^2 = 0
  Eigen::VectorXd c(11);
  c.head(6) = bernstein_coeffs_of(2, spec.triangle, parabola_q);
  c.tail(5).setConstant(-0.25);
  CHECK((D.D * c).norm() / c.norm() < 1e-10);

  SUBCASE("scaling x, y, w by 2 scales D_q by 2^d exactly") {
    const RationalFamily g(2.0 * f.x(), 2.0 * f.y(), 2.0 * f.w(), f.domain());
    const CollocationMatrix Dg = build_D(g, spec);
    CHECK(Dg.D_q() == 4.0 * D.D_q());
  }
  SUBCASE("parallel assembly is bit-identical") {
    const CollocationMatrix D1 = build_D(f, h, spec, true, 1);
    const CollocationMatrix D4 = build_D(f, h, spec, true, 4);
    CHECK(D1.D == D4.D);
  }
}

TEST_CASE("build_D with h = 0 has an empty lambda block") {
  const BiPoly x = poly({{0.0, 1.0}, {1.0, 0.5}});
  const RationalFamily f(x, x, BiPoly::constant(1.0), kUnitSquare);
  const BiPoly h = envelope_function(f);
  CHECK(h.is_zero());
  const ImplicitBasisSpec spec = make_basis_spec(f, h, 2, ImplicitOptions{.lambda_bidegree = std::pair{1, 1}});
  const CollocationMatrix D = build_D(f, h, spec);
  CHECK(D.D_lambda().cwiseAbs().maxCoeff() == 0.0);
  CHECK(D.D_q().cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("solve_min") {
  SUBCASE("zero column") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Random(8, 4);
    D.col(2).setZero();
    const SvdSolution sol = solve_min(D);
    CHECK(sol.sigma_min < 1e-14);
    CHECK(std::abs(sol.c[2] - 1.0) < 1e-12);
    CHECK(sol.c.norm() == doctest::Approx(1.0));
  }
  SUBCASE("exactly zero matrix column gives infinite gap") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 1);
    const SvdSolution sol = solve_min(D);
    CHECK(sol.sigma_min == 0.0);
    CHECK(sol.sigma_gap == std::numeric_limits<double>::infinity());
  }
  SUBCASE("orthogonal matrix") {
    const Eigen::MatrixXd Q = Eigen::MatrixXd::Random(6, 6).householderQr().householderQ();
    const SvdSolution sol = solve_min(Q);
    CHECK(sol.sigma_min == doctest::Approx(1.0));
    CHECK((Q * sol.c).norm() == doctest::Approx(1.0));
  }
  SUBCASE("random tall matrix: brute-force minimality") {
    std::mt19937_64 rng(44);
    std::normal_distribution<double> g;
    Eigen::MatrixXd D(30, 11);
    for (Eigen::Index k = 0; k < D.size(); ++k) D.data()[k] = g(rng);
    const SvdSolution sol = solve_min(D);
    CHECK(std::abs((D * sol.c).norm() - sol.sigma_min) <= 1e-12);
    CHECK(sol.sigma_gap >= 1.0);
    Eigen::Index imax = 0;
    sol.c.cwiseAbs().maxCoeff(&imax);
    CHECK(sol.c[imax] > 0.0);
    for (int k = 0; k < 100; ++k) CHECK((D * random_unit(rng, 11)).norm() >= sol.sigma_min);
  }
  SUBCASE("wide matrices are padded") {
    const Eigen::MatrixXd D = Eigen::MatrixXd::Random(3, 5);
    const SvdSolution sol = solve_min(D);
    CHECK(sol.padded_rows == 2);
    CHECK(sol.sigma_min < 1e-12);
    CHECK((D * sol.c).norm() < 1e-12);
  }
  SUBCASE("non-finite input") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Ones(3, 2);
    D(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_min(D), NumericalFailure);
  }
}

TEST_CASE("column permutation permutes the solution") {
  const RationalFamily f = parabola_family();
  const BiPoly h = envelope_function(f);
  const CollocationMatrix D = build_D(f, h, make_basis_spec(f, h, 1));
  const SvdSolution base = solve_min(D.D);
  std::vector<int> perm(D.D.cols());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(9);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd P(D.D.rows(), D.D.cols());
  for (std::size_t k = 0; k < perm.size(); ++k) P.col(k) = D.D.col(perm[k]);
  const SvdSolution shuffled = solve_min(P);
  CHECK(std::abs(shuffled.sigma_min - base.sigma_min) <= 1e-12);
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(std::abs(shuffled.c[k] - base.c[perm[k]]) <= 1e-10);
}

TEST_CASE("implicitize: exact parabola") {
  const RationalFamily f = parabola_family();
  const ImplicitApproximation a = implicitize(f, 2);
  CHECK(a.sigma_min < 1e-10);
  CHECK(a.rows == 15);
  CHECK(a.cols == 11);
  CHECK(std::hypot(a.c_q.norm(), a.c_lambda.norm()) == doctest::Approx(1.0).epsilon(1e-12));
  const double nq = a.c_q.norm();
  for (int k = 0; k < 20; ++k) {
    const double s = k / 19.0;
    CHECK(std::abs(eval_q(a, Point(s, s * s))) / nq < 1e-8);
  }
  // lambda is constant and q o p = lambda h^2 (w = 1)
  CHECK(std::abs(eval_q(a, eval_family(f, 0.3, 0.4)) - eval_lambda(a, 0.3, 0.4) * 0.64) < 1e-10);
}

TEST_CASE("implicitize: cuspidal cubic") {
  SUBCASE("reduced tangent parameterization is recovered exactly") {
    const ImplicitApproximation a = implicitize(reduced_cusp_family(), 3);
    CHECK(a.sigma_min < 1e-9);
    const double nq = a.c_q.norm();
    for (int k = 0; k < 50; ++k) {
      const double s = k / 49.0;
      CHECK(std::abs(eval_q(a, Point(s * s, s * s * s))) / nq < 1e-7);
    }
  }
  SUBCASE("direction c'(s) keeps the improper factor s^2 in h") {
    // h = -6 t s^2 forces s^4 | lambda h^2, which y^2 - x^3 o p does not
    // satisfy, so the minimum stays away from zero; the curve is still
    // approximated closely.
    const ImplicitApproximation a = implicitize(cusp_family(), 3);
    CHECK(a.sigma_min > 1e-9);
    CHECK(a.sigma_min < 1e-6);
    const double nq = a.c_q.norm();
    for (int k = 0; k < 50; ++k) {
      const double s = k / 49.0;
      CHECK(std::abs(eval_q(a, Point(s * s, s * s * s))) / nq < 1e-7);
    }
  }
}

TEST_CASE("implicitize: a line cannot carry the parabola") {
  const RationalFamily f = parabola_family();
  const ImplicitApproximation a = implicitize(f, 1);
  CHECK(a.sigma_min > 1e-3);
  // brute-force objective of the returned vector agrees with sigma_min^2
  const BiPoly h = envelope_function(f);
  Eigen::VectorXd c(a.c_q.size() + a.c_lambda.size());
  c << a.c_q, a.c_lambda;
  const double integral = weighted_residual_integral(f, h, a.spec, c, 4 * (std::max(a.spec.L1, a.spec.L2) + 1));
  CHECK(integral / weighted_norm_constant(f.domain()) == doctest::Approx(a.sigma_min * a.sigma_min).epsilon(1e-8));
}

TEST_CASE("weighted L2 identity for random coefficient vectors") {
  std::mt19937_64 rng(21);
  for (const RationalFamily& f : {parabola_family(), reduced_cusp_family(Rect{{0.2, 1.0}, {-0.5, 0.5}})}) {
    const BiPoly h = envelope_function(f);
    const ImplicitBasisSpec spec = make_basis_spec(f, h, 2);
    const CollocationMatrix D = build_D(f, h, spec, true);
    const int n = 4 * (std::max(spec.L1, spec.L2) + 1);
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd c = random_unit(rng, D.D.cols());
      const double lhs = weighted_residual_integral(f, h, spec, c, n);
      const double rhs = weighted_norm_constant(f.domain()) * (D.D * c).squaredNorm();
      CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
    }
  }
}

TEST_CASE("without row weighting D c holds the plain Chebyshev coefficients of the residual") {
  std::mt19937_64 rng(22);
  const RationalFamily f = parabola_family(Rect{{-1.0, 0.5}, {0.25, 1.0}});
  const BiPoly h = envelope_function(f);
  const ImplicitBasisSpec spec = make_basis_spec(f, h, 2);
  const CollocationMatrix D = build_D(f, h, spec, false);
  const Eigen::VectorXd c = random_unit(rng, D.D.cols());
  const ChebGrid grid(spec.L1, spec.L2, f.domain());
  Eigen::MatrixXd r(grid.rows(), grid.cols());
  for (Eigen::Index a = 0; a < grid.rows(); ++a) {
    for (Eigen::Index b = 0; b < grid.cols(); ++b) r(a, b) = residual(f, h, spec, c, grid.nodes_s[a], grid.nodes_t[b]);
  }
  const Eigen::MatrixXd g = dense_cheb_coeffs(r);
  const Eigen::VectorXd Dc = D.D * c;
  for (int i = 0; i <= spec.L1; ++i) {
    for (int j = 0; j <= spec.L2; ++j) CHECK(std::abs(Dc[D.row_of(i, j)] - g(i, j)) <= 1e-12);
  }
}

TEST_CASE("exactness: sigma_min <= 1e-9 ||D||_2 when an exact relation exists") {
  struct Case {
    RationalFamily f;
    int d;
  };
  const std::vector<Case> cases = {
      {parabola_family(), 2},
      {parabola_family(), 3},
      {reduced_cusp_family(), 3},
      {power_tangent_family(5, kQuinticDomain), 5},
  };
  for (const auto& [f, d] : cases) {
    const BiPoly h = envelope_function(f);
    const CollocationMatrix D = build_D(f, h, make_basis_spec(f, h, d));
    const double norm2 = D.D.jacobiSvd().singularValues()[0];
    CHECK(solve_min(D.D).sigma_min <= 1e-9 * norm2);
  }
}

TEST_CASE("sigma_min is invariant under reparameterizations with unit Jacobian") {
  const RationalFamily f = parabola_family();
  const ImplicitOptions pinned{.triangle = reference_triangle(f)};
  const double base = implicitize(f, 1, pinned).sigma_min;

  struct Map {
    double as, bs, at, bt;
  };
  // s = as * s' + bs, t = at * t' + bt; the new domain is the preimage of [0,1]^2
  for (const Map m : {Map{1, 0.25, 1, -0.5}, Map{-1, 1, 1, 0}, Map{2, 0, 0.5, 0}}) {
    auto pre = [](double a, double b, const Interval& iv) {
      const double x = (iv.lo - b) / a, y = (iv.hi - b) / a;
      return Interval{std::min(x, y), std::max(x, y)};
    };
    const Rect dom{pre(m.as, m.bs, f.domain().s), pre(m.at, m.bt, f.domain().t)};
    const RationalFamily g(compose_affine(f.x(), m.as, m.bs, m.at, m.bt),
                           compose_affine(f.y(), m.as, m.bs, m.at, m.bt),
                           compose_affine(f.w(), m.as, m.bs, m.at, m.bt), dom);
    const ImplicitApproximation a = implicitize(g, 1, pinned);
    CHECK(std::abs(a.sigma_min - base) <= 1e-9);
  }
}

TEST_CASE("implicitize validates its inputs") {
  CHECK_THROWS_AS(implicitize(parabola_family(), 0), InvalidInput);
  const ImplicitOptions bad{.triangle = Triangle{{Point(0, 0), Point(1, 0), Point(2, 0)}}};
  CHECK_THROWS_AS(implicitize(parabola_family(), 2, bad), DegenerateTriangle);
}
