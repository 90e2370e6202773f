#include "envimp/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <string>

#include "envimp/errors.hpp"
#include "envimp/io.hpp"

namespace envimp {

namespace {

constexpr int kWeightCheckGrid = 64;

std::string point_str(double s, double t) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "(" << s << ", " << t << ")";
  return os.str();
}

}  // namespace

RationalFamily::RationalFamily(BiPoly x, BiPoly y, BiPoly w, Rect domain) : domain_(domain) {
  if (!(domain.s.length() > 0.0) || !(domain.t.length() > 0.0)) {
    throw InvalidInput("parameter intervals must have positive length");
  }
  x = degree_trim(x);
  y = degree_trim(y);
  w = degree_trim(w);
  const int m = std::max({x.deg_s(), y.deg_s(), w.deg_s()});
  const int n = std::max({x.deg_t(), y.deg_t(), w.deg_t()});
  x_ = pad_to(x, m, n);
  y_ = pad_to(y, m, n);
  w_ = pad_to(w, m, n);
  if (w_.is_zero()) throw DenominatorNearZero("w is identically zero");

  // A sign change between grid samples means a zero crossing in between.
  int sign = 0;
  for (int i = 0; i < kWeightCheckGrid; ++i) {
    const double s = domain_.s.from_unit(static_cast<double>(i) / (kWeightCheckGrid - 1));
    for (int j = 0; j < kWeightCheckGrid; ++j) {
      const double t = domain_.t.from_unit(static_cast<double>(j) / (kWeightCheckGrid - 1));
      const double wv = checked_weight(*this, s, t);
      const int sg = wv > 0 ? 1 : -1;
      if (sign == 0) {
        sign = sg;
      } else if (sg != sign) {
        throw DenominatorNearZero("w changes sign on the domain near " + point_str(s, t));
      }
    }
  }
}

RationalFamily RationalFamily::restricted_to(const Rect& region) const {
  return RationalFamily(x_, y_, w_, region);
}

double RationalFamily::w_tolerance() const { return 1e-14 * w_.max_abs_coeff(); }

double checked_weight(const RationalFamily& f, double s, double t) {
  const double wv = eval(f.w(), s, t);
  if (!(std::abs(wv) >= f.w_tolerance())) {
    throw DenominatorNearZero("w vanishes at " + point_str(s, t));
  }
  return wv;
}

Point eval_family(const RationalFamily& f, double s, double t) {
  const double wv = checked_weight(f, s, t);
  return {eval(f.x(), s, t) / wv, eval(f.y(), s, t) / wv};
}

BiPoly envelope_function(const RationalFamily& f, double trim_tol) {
  const BiPoly& x = f.x();
  const BiPoly& y = f.y();
  const BiPoly& w = f.w();
  const BiPoly xs = diff(x, Var::S), xt = diff(x, Var::T);
  const BiPoly ys = diff(y, Var::S), yt = diff(y, Var::T);
  const BiPoly ws = diff(w, Var::S), wt = diff(w, Var::T);
  // Cofactor expansion along the first column, written so that exchanging
  // x and y negates every intermediate exactly.
  const BiPoly h = (x * (ys * wt - yt * ws) + y * (xt * ws - xs * wt)) + w * (xs * yt - xt * ys);
  return degree_trim(h, trim_tol);
}

double jacobian_det(const RationalFamily& f, double s, double t, double step) {
  const Point ds = (eval_family(f, s + step, t) - eval_family(f, s - step, t)) / (2.0 * step);
  const Point dt = (eval_family(f, s, t + step) - eval_family(f, s, t - step)) / (2.0 * step);
  return ds.x() * dt.y() - dt.x() * ds.y();
}

std::string fingerprint(const RationalFamily& f) {
  std::string bytes;
  auto put = [&bytes](double v) {
    char buf[sizeof(double)];
    std::memcpy(buf, &v, sizeof v);
    bytes.append(buf, sizeof buf);
  };
  put(f.n1());
  put(f.n2());
  for (const BiPoly* p : {&f.x(), &f.y(), &f.w()}) {
    for (Eigen::Index i = 0; i < p->coeffs().size(); ++i) put(p->coeffs().data()[i]);
  }
  const Rect& d = f.domain();
  for (double v : {d.s.lo, d.s.hi, d.t.lo, d.t.hi}) put(v);
  return sha256_hex(bytes);
}

}  // namespace envimp
