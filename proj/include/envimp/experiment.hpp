#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "envimp/bipoly.hpp"
#include "envimp/domain.hpp"
#include "envimp/envelope.hpp"
#include "envimp/implicitize.hpp"

namespace envimp {

/// Parameter points on the zero set of h inside `region`.
struct ZeroSetSample {
  std::vector<Point> points;
  Rect region;
  double ztol = 0.0;  // every point has |h| <= ztol
};

/// Zero-set threshold used by the tracer: 1e-12 * max|h coeffs|.
double default_ztol(const BiPoly& h);

/// Scans `resolution` lines of constant t and of constant s, brackets sign
/// changes of h (and samples that are already zero), refines by bisection,
/// and removes points closer than diameter / (4 * resolution).
/// Throws EmptyZeroSet when nothing is found.
ZeroSetSample trace_zero_set(const BiPoly& h, const Rect& region, int resolution);
ZeroSetSample trace_zero_set(const RationalFamily& f, const Rect& region, int resolution);

/// max |q(p(s,t))| over the samples, with c_q rescaled to unit 2-norm.
double max_algebraic_error(const ImplicitApproximation& a, const RationalFamily& f, const ZeroSetSample& zs);

/// Squares of diameter 2^-i centered at `center`, clipped to `base`, i = 0..i_max.
std::vector<Rect> subdivision_regions(const Point& center, int i_max, const Rect& base);

/// Values below this are reported as "n/a".
inline constexpr double kMachineEpsilonCutoff = 1e-15;

struct ConvergenceRow {
  int d = 1;
  int i = 0;
  double diameter = 1.0;
  std::optional<double> epsilon;  // empty: below kMachineEpsilonCutoff
  std::optional<double> rate;     // log2(eps_{d,i-1} / eps_{d,i}); empty for i = 0 or n/a
  Eigen::Index rows = 0, cols = 0;
  double assembly_ms = 0.0;
  double svd_ms = 0.0;
};

struct ConvergenceTable {
  Point center;
  std::vector<ConvergenceRow> rows;  // ordered by (d, i)

  const ConvergenceRow* find(int d, int i) const;
};

/// Rate between consecutive stored epsilons (empty if either is n/a).
std::optional<double> convergence_rate(const std::optional<double>& coarse, const std::optional<double>& fine);

struct StudyOptions {
  std::optional<Point> center;  // must lie on the zero set; default: auto
  int trace_resolution = 256;
  unsigned threads = 0;
};

/// The traced zero-set point nearest the domain midpoint; ties go to smaller
/// s, then smaller t.
Point auto_center(const ZeroSetSample& zs, const Rect& domain);

/// Implicitizes over nested regions around a zero-set point for d = 1..d_max
/// and i = 0..i_max, all with the reference triangle of the full domain.
/// Throws EmptyZeroSet if the center is off the zero set or no zero set exists.
ConvergenceTable convergence_study(const RationalFamily& f, int d_max, int i_max, const StudyOptions& options = {});

struct BenchmarkRow {
  int d = 1;
  Eigen::Index rows = 0, cols = 0;
  Eigen::Index entries() const { return rows * cols; }
  double assembly_ms = 0.0;
  double svd_ms = 0.0;
  double total_ms() const { return assembly_ms + svd_ms; }
};

/// Times the full pipeline per degree, serially, after one discarded warm-up run.
std::vector<BenchmarkRow> benchmark(const RationalFamily& f, const std::vector<int>& degrees, unsigned threads = 0);

// CSV serialization (C locale, round-trip precision).
void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);
ConvergenceTable read_convergence_csv(std::istream& is);
void write_benchmark_csv(std::ostream& os, const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> read_benchmark_csv(std::istream& is);

/// Human-readable table laid out as epsilon/rate pairs per degree.
std::string format_convergence_table(const ConvergenceTable& table);

}  // namespace envimp
