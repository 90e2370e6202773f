#include "envimp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "envimp/errors.hpp"
#include "envimp/io.hpp"

namespace envimp {

namespace {

constexpr int kBisectionSteps = 80;
constexpr int kSamplesPerResolution = 2;  // samples along a scan line per grid line
constexpr double kCenterTolerance = 1e-8;  // relative to max|h coeffs|

// Keeps points at least `min_dist` apart, first come first kept.
class PointDeduplicator {
public:
  explicit PointDeduplicator(double min_dist) : min_dist_(min_dist) {}

  bool insert(const Point& p) {
    const long long cx = cell(p.x());
    const long long cy = cell(p.y());
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t idx : it->second) {
          if ((points_[idx] - p).norm() < min_dist_) return false;
        }
      }
    }
    cells_[key(cx, cy)].push_back(points_.size());
    points_.push_back(p);
    return true;
  }

  std::vector<Point> take() { return std::move(points_); }

private:
  long long cell(double v) const { return static_cast<long long>(std::floor(v / min_dist_)); }
  static long long key(long long a, long long b) { return a * 1000003LL + b; }

  double min_dist_;
  std::vector<Point> points_;
  std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

// Scans h along the segment from `a` to `b`; appends zero-set points.
void scan_line(const BiPoly& h, const Point& a, const Point& b, int samples, double ztol, std::vector<Point>& out) {
  auto at = [&](double u) -> Point { return a + u * (b - a); };
  auto hv = [&](const Point& p) { return eval(h, p.x(), p.y()); };

  double u_prev = 0.0;
  double f_prev = hv(a);
  if (std::abs(f_prev) <= ztol) out.push_back(a);
  for (int k = 1; k < samples; ++k) {
    const double u = static_cast<double>(k) / (samples - 1);
    const Point p = at(u);
    const double f = hv(p);
    if (std::abs(f) <= ztol) {
      out.push_back(p);
    } else if (std::abs(f_prev) > ztol && (f > 0) != (f_prev > 0)) {
      double lo = u_prev, hi = u, flo = f_prev;
      Point mid = at(0.5 * (lo + hi));
      double fmid = hv(mid);
      for (int it = 0; it < kBisectionSteps && std::abs(fmid) > ztol; ++it) {
        if ((fmid > 0) == (flo > 0)) {
          lo = 0.5 * (lo + hi);
          flo = fmid;
        } else {
          hi = 0.5 * (lo + hi);
        }
        mid = at(0.5 * (lo + hi));
        fmid = hv(mid);
      }
      if (std::abs(fmid) <= ztol) out.push_back(mid);
    }
    u_prev = u;
    f_prev = f;
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string opt_str(const std::optional<double>& v, const char* missing) {
  return v ? format_double(*v) : std::string(missing);
}

std::optional<double> opt_parse(const std::string& s) {
  if (s.empty() || s == "n/a") return std::nullopt;
  return parse_double(s);
}

long long parse_int(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v)) throw InvalidInput("expected an integer, got '" + s + "'");
  return static_cast<long long>(v);
}

}  // namespace

double default_ztol(const BiPoly& h) { return 1e-12 * h.max_abs_coeff(); }

ZeroSetSample trace_zero_set(const BiPoly& h, const Rect& region, int resolution) {
  if (resolution < 8) throw InvalidInput("resolution must be at least 8");
  if (h.is_zero()) throw EmptyZeroSet("the envelope function vanishes identically; its zero set is not a curve");

  ZeroSetSample zs;
  zs.region = region;
  zs.ztol = default_ztol(h);
  const int samples = kSamplesPerResolution * resolution + 1;

  std::vector<Point> raw;
  // Lines of constant t, then lines of constant s.
  for (int k = 0; k < resolution; ++k) {
    const double t = region.t.from_unit(static_cast<double>(k) / (resolution - 1));
    scan_line(h, Point(region.s.lo, t), Point(region.s.hi, t), samples, zs.ztol, raw);
  }
  for (int k = 0; k < resolution; ++k) {
    const double s = region.s.from_unit(static_cast<double>(k) / (resolution - 1));
    scan_line(h, Point(s, region.t.lo), Point(s, region.t.hi), samples, zs.ztol, raw);
  }

  PointDeduplicator dedup(region.diameter() / (4.0 * resolution));
  for (const Point& p : raw) dedup.insert(p);
  zs.points = dedup.take();
  if (zs.points.empty()) throw EmptyZeroSet("no envelope points found in the region");
  return zs;
}

ZeroSetSample trace_zero_set(const RationalFamily& f, const Rect& region, int resolution) {
  return trace_zero_set(envelope_function(f), region, resolution);
}

double max_algebraic_error(const ImplicitApproximation& a, const RationalFamily& f, const ZeroSetSample& zs) {
  if (zs.points.empty()) throw EmptyZeroSet("no zero-set samples to measure");
  const double norm = a.c_q.norm();
  if (!(norm > 0.0)) throw NumericalFailure("implicit coefficients are zero");
  double worst = 0.0;
  for (const Point& st : zs.points) {
    const Point p = eval_family(f, st.x(), st.y());
    const Eigen::VectorXd values = triangular_bernstein_eval(a.spec.degree, a.spec.triangle, p);
    worst = std::max(worst, std::abs(a.c_q.dot(values)) / norm);
  }
  return worst;
}

std::vector<Rect> subdivision_regions(const Point& center, int i_max, const Rect& base) {
  if (i_max < 0) throw InvalidInput("i_max must be nonnegative");
  std::vector<Rect> regions;
  for (int i = 0; i <= i_max; ++i) {
    const double half = 0.5 * std::ldexp(1.0, -i) / std::sqrt(2.0);
    const Rect square{{center.x() - half, center.x() + half}, {center.y() - half, center.y() + half}};
    regions.push_back(intersect(square, base));
  }
  return regions;
}

const ConvergenceRow* ConvergenceTable::find(int d, int i) const {
  for (const auto& r : rows) {
    if (r.d == d && r.i == i) return &r;
  }
  return nullptr;
}

std::optional<double> convergence_rate(const std::optional<double>& coarse, const std::optional<double>& fine) {
  if (!coarse || !fine) return std::nullopt;
  return std::log2(*coarse / *fine);
}

Point auto_center(const ZeroSetSample& zs, const Rect& domain) {
  if (zs.points.empty()) throw EmptyZeroSet("no zero-set samples to pick a center from");
  const Point mid = domain.center();
  const Point* best = &zs.points.front();
  double best_dist = (*best - mid).norm();
  for (const Point& p : zs.points) {
    const double dist = (p - mid).norm();
    const bool tie = dist == best_dist;
    if (dist < best_dist || (tie && (p.x() < best->x() || (p.x() == best->x() && p.y() < best->y())))) {
      best = &p;
      best_dist = dist;
    }
  }
  return *best;
}

ConvergenceTable convergence_study(const RationalFamily& f, int d_max, int i_max, const StudyOptions& options) {
  if (d_max < 1) throw InvalidInput("dmax must be >= 1");
  if (i_max < 0) throw InvalidInput("imax must be >= 0");
  const BiPoly h = envelope_function(f);
  if (h.is_zero()) throw EmptyZeroSet("the envelope function vanishes identically");

  ConvergenceTable table;
  if (options.center) {
    const Point c = *options.center;
    const double hc = eval(h, c.x(), c.y());
    if (!f.domain().contains(c.x(), c.y()) || std::abs(hc) > kCenterTolerance * h.max_abs_coeff()) {
      throw EmptyZeroSet("center not on envelope zero set (|h| = " + fmt("%.3e", std::abs(hc)) + ")");
    }
    table.center = c;
  } else {
    table.center = auto_center(trace_zero_set(h, f.domain(), options.trace_resolution), f.domain());
  }

  // One triangle for every level, so that unit-norm coefficients measure
  // the algebraic error on a common scale.
  const Triangle triangle = reference_triangle(f);
  const std::vector<Rect> regions = subdivision_regions(table.center, i_max, f.domain());

  std::map<std::pair<int, int>, ConvergenceRow> rows;
  for (int i = 0; i <= i_max; ++i) {
    const RationalFamily local = f.restricted_to(regions[i]);
    const ZeroSetSample zs = trace_zero_set(h, regions[i], options.trace_resolution);
    for (int d = 1; d <= d_max; ++d) {
      ImplicitOptions io;
      io.triangle = triangle;
      io.threads = options.threads;
      const ImplicitApproximation approx = implicitize(local, d, io);
      const double eps = max_algebraic_error(approx, local, zs);

      ConvergenceRow row;
      row.d = d;
      row.i = i;
      row.diameter = std::ldexp(1.0, -i);
      if (eps >= kMachineEpsilonCutoff) row.epsilon = eps;
      row.rows = approx.rows;
      row.cols = approx.cols;
      row.assembly_ms = approx.timing.assembly_ms;
      row.svd_ms = approx.timing.svd_ms;
      rows[{d, i}] = row;
    }
  }
  for (auto& [key, row] : rows) {
    if (row.i > 0) row.rate = convergence_rate(rows.at({row.d, row.i - 1}).epsilon, row.epsilon);
    table.rows.push_back(row);
  }
  return table;
}

std::vector<BenchmarkRow> benchmark(const RationalFamily& f, const std::vector<int>& degrees, unsigned threads) {
  std::vector<BenchmarkRow> out;
  if (degrees.empty()) return out;
  ImplicitOptions io;
  io.threads = threads;
  (void)implicitize(f, degrees.front(), io);  // warm-up
  for (int d : degrees) {
    const ImplicitApproximation a = implicitize(f, d, io);
    out.push_back({d, a.rows, a.cols, a.timing.assembly_ms, a.timing.svd_ms});
  }
  return out;
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
  os << "d,i,diameter,epsilon,rate,rows,cols,assembly_ms,svd_ms\n";
  for (const auto& r : table.rows) {
    const char* missing_rate = (r.i == 0) ? "" : "n/a";
    os << r.d << ',' << r.i << ',' << format_double(r.diameter) << ',' << opt_str(r.epsilon, "n/a") << ','
       << opt_str(r.rate, missing_rate) << ',' << r.rows << ',' << r.cols << ',' << format_double(r.assembly_ms)
       << ',' << format_double(r.svd_ms) << '\n';
  }
}

ConvergenceTable read_convergence_csv(std::istream& is) {
  ConvergenceTable table;
  std::string line;
  if (!std::getline(is, line) || line != "d,i,diameter,epsilon,rate,rows,cols,assembly_ms,svd_ms") {
    throw InvalidInput("unexpected convergence CSV header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw InvalidInput("convergence CSV row must have 9 fields: " + line);
    ConvergenceRow r;
    r.d = static_cast<int>(parse_int(f[0]));
    r.i = static_cast<int>(parse_int(f[1]));
    r.diameter = parse_double(f[2]);
    r.epsilon = opt_parse(f[3]);
    r.rate = opt_parse(f[4]);
    r.rows = parse_int(f[5]);
    r.cols = parse_int(f[6]);
    r.assembly_ms = parse_double(f[7]);
    r.svd_ms = parse_double(f[8]);
    table.rows.push_back(r);
  }
  return table;
}

void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows) {
  os << "d,rows,cols,entries,assembly_ms,svd_ms,total_ms\n";
  for (const auto& r : rows) {
    os << r.d << ',' << r.rows << ',' << r.cols << ',' << r.entries() << ',' << format_double(r.assembly_ms) << ','
       << format_double(r.svd_ms) << ',' << format_double(r.total_ms()) << '\n';
  }
}

std::vector<BenchmarkRow> read_benchmark_csv(std::istream& is) {
  std::vector<BenchmarkRow> out;
  std::string line;
  if (!std::getline(is, line) || line != "d,rows,cols,entries,assembly_ms,svd_ms,total_ms") {
    throw InvalidInput("unexpected benchmark CSV header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw InvalidInput("benchmark CSV row must have 7 fields: " + line);
    BenchmarkRow r;
    r.d = static_cast<int>(parse_int(f[0]));
    r.rows = parse_int(f[1]);
    r.cols = parse_int(f[2]);
    if (parse_int(f[3]) != r.entries()) throw InvalidInput("entries column disagrees with rows * cols");
    r.assembly_ms = parse_double(f[4]);
    r.svd_ms = parse_double(f[5]);
    out.push_back(r);
  }
  return out;
}

std::string format_convergence_table(const ConvergenceTable& table) {
  int d_max = 0, i_max = 0;
  for (const auto& r : table.rows) {
    d_max = std::max(d_max, r.d);
    i_max = std::max(i_max, r.i);
  }
  std::ostringstream os;
  os << "center (s, t) = (" << format_double(table.center.x()) << ", " << format_double(table.center.y()) << ")\n";
  os << "diameter  ";
  for (int d = 1; d <= d_max; ++d) {
    char head[64];
    std::snprintf(head, sizeof head, "| eps(d=%d)   rate    ", d);
    os << head;
  }
  os << "\n";
  for (int i = 0; i <= i_max; ++i) {
    char lead[32];
    std::snprintf(lead, sizeof lead, "1/%-7lld ", 1LL << i);
    os << (i == 0 ? std::string("1         ") : std::string(lead));
    for (int d = 1; d <= d_max; ++d) {
      const ConvergenceRow* r = table.find(d, i);
      std::string eps = "n/a", rate = "-";
      if (r) {
        if (r->epsilon) eps = fmt("%.2e", *r->epsilon);
        if (r->i > 0) rate = r->rate ? fmt("%.3f", *r->rate) : "n/a";
      }
      char cell[64];
      std::snprintf(cell, sizeof cell, "| %-10s %-8s ", eps.c_str(), rate.c_str());
      os << cell;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace envimp
