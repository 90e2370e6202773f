#include "envimp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include "envimp/errors.hpp"
#include "envimp/experiment.hpp"
#include "envimp/implicitize.hpp"
#include "envimp/io.hpp"

namespace envimp::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kFamilyMembers = 64;
constexpr int kMemberSamples = 129;

std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_double(item));
  if (values.size() != expected) {
    throw InvalidInput(what + " expects " + std::to_string(expected) + " comma-separated numbers");
  }
  return values;
}

std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  auto to_int = [](const std::string& s) {
    const double v = parse_double(s);
    if (v != std::floor(v)) throw InvalidInput("degree must be an integer: " + s);
    return static_cast<int>(v);
  };
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (hi < lo) throw InvalidInput("empty degree range " + text);
    for (int d = lo; d <= hi; ++d) out.push_back(d);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  }
  if (out.empty()) throw InvalidInput("no degrees given");
  for (int d : out) {
    if (d < 1) throw InvalidInput("degree must be ≥ 1");
  }
  return out;
}

fs::path sibling_path(const fs::path& out, const std::string& tag) {
  fs::path p = out;
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_extension();
  p += "." + tag + ext;
  return p;
}

// Parses flags, then runs `body`, translating library errors to exit codes.
int guarded(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::function<int()>& body) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kMalformedInput;
  }
  try {
    return body();
  } catch (const EmptyZeroSet& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kEmptyZeroSet;
  } catch (const NumericalFailure& e) {
    err << app.get_name() << ": numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const InvalidInput& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kMalformedInput;
  } catch (const DenominatorNearZero& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kMalformedInput;
  } catch (const DegenerateImage& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kMalformedInput;
  } catch (const DegenerateTriangle& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kMalformedInput;
  } catch (const Error& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace

int cmd_implicitize(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Approximate implicit equation of the envelope of a rational family", "implicitize");
  std::string family_path, out_path;
  int degree = 0;
  std::optional<int> k1, k2;
  bool no_row_weighting = false;
  app.add_option("--family", family_path, "family file (JSON)")->required();
  app.add_option("--degree", degree, "total degree d of the implicit polynomial")->required();
  app.add_option("--k1", k1, "override the s-degree of lambda");
  app.add_option("--k2", k2, "override the t-degree of lambda");
  app.add_flag("--no-row-weighting", no_row_weighting, "use plain Chebyshev coefficients");
  app.add_option("--out", out_path, "result file to write");

  return guarded(app, args, out, err, [&] {
    if (degree < 1) throw InvalidInput("degree must be ≥ 1");
    const std::string text = read_text_file(family_path);
    const RationalFamily f = parse_family(text);

    ImplicitOptions options;
    options.row_weighting = !no_row_weighting;
    if (k1 || k2) {
      const auto [dk1, dk2] = lambda_degrees(f, degree);
      options.lambda_bidegree = std::pair{k1.value_or(dk1), k2.value_or(dk2)};
    }
    ResultFile result;
    result.approx = implicitize(f, degree, options);
    result.family = f;
    result.input_fingerprint = sha256_hex(text);

    const ImplicitApproximation& a = result.approx;
    if (a.padded_rows > 0) {
      err << "warning: D has fewer rows than columns; padded with " << a.padded_rows << " zero rows\n";
    }
    out << "sigma_min " << format_double(a.sigma_min) << "\n"
        << "sigma_gap " << format_double(a.sigma_gap) << "\n"
        << "matrix " << a.rows << " x " << a.cols << "\n";
    if (!out_path.empty()) write_file_atomic(out_path, serialize_result(result));
    return kOk;
  });
}

int cmd_study(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Subdivision convergence study of the algebraic error", "study");
  std::string family_path, out_path, center_text;
  int dmax = 0, imax = 0, resolution = 256;
  app.add_option("--family", family_path, "family file (JSON)")->required();
  app.add_option("--dmax", dmax, "largest implicit degree")->required();
  app.add_option("--imax", imax, "deepest subdivision level")->required();
  app.add_option("--center", center_text, "s,t on the envelope zero set");
  app.add_option("--resolution", resolution, "zero-set tracing resolution");
  app.add_option("--out", out_path, "CSV file to write");

  return guarded(app, args, out, err, [&] {
    if (dmax < 1) throw InvalidInput("dmax must be ≥ 1");
    if (imax < 0) throw InvalidInput("imax must be ≥ 0");
    const RationalFamily f = parse_family(read_text_file(family_path));
    StudyOptions options;
    options.trace_resolution = resolution;
    if (!center_text.empty()) {
      const auto c = parse_list(center_text, 2, "--center");
      options.center = Point(c[0], c[1]);
    }
    const ConvergenceTable table = convergence_study(f, dmax, imax, options);
    out << format_convergence_table(table);
    if (!out_path.empty()) {
      std::ostringstream csv;
      write_convergence_csv(csv, table);
      write_file_atomic(out_path, csv.str());
    }
    return kOk;
  });
}

int cmd_contour(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Sample q on a grid for external contouring", "contour");
  std::string result_path, box_text, out_path = "contour.csv";
  int grid = 0;
  app.add_option("--result", result_path, "result file from implicitize")->required();
  app.add_option("--grid", grid, "samples per axis")->required();
  app.add_option("--box", box_text, "x0,y0,x1,y1 (default: triangle bounding box)");
  app.add_option("--out", out_path, "grid CSV; family polylines go to <stem>.family<ext>");

  return guarded(app, args, out, err, [&] {
    if (grid < 1) throw InvalidInput("grid must be ≥ 1");
    const ResultFile r = parse_result(read_text_file(result_path));
    const ImplicitApproximation& a = r.approx;

    double x0, y0, x1, y1;
    if (!box_text.empty()) {
      const auto b = parse_list(box_text, 4, "--box");
      x0 = b[0];
      y0 = b[1];
      x1 = b[2];
      y1 = b[3];
      if (!(x1 > x0) || !(y1 > y0)) throw InvalidInput("--box needs x0 < x1 and y0 < y1");
    } else {
      const auto& v = a.spec.triangle.v;
      x0 = std::min({v[0].x(), v[1].x(), v[2].x()});
      x1 = std::max({v[0].x(), v[1].x(), v[2].x()});
      y0 = std::min({v[0].y(), v[1].y(), v[2].y()});
      y1 = std::max({v[0].y(), v[1].y(), v[2].y()});
    }

    auto axis = [grid](double lo, double hi, int k) {
      return grid == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / (grid - 1);
    };
    std::ostringstream csv;
    csv << "x,y,q\n";
    for (int iy = 0; iy < grid; ++iy) {
      const double y = axis(y0, y1, iy);
      for (int ix = 0; ix < grid; ++ix) {
        const double x = axis(x0, x1, ix);
        csv << format_double(x) << ',' << format_double(y) << ',' << format_double(eval_q(a, Point(x, y))) << '\n';
      }
    }
    write_file_atomic(out_path, csv.str());

    if (r.family) {
      const RationalFamily& f = *r.family;
      std::ostringstream poly;
      poly << "member,t,s,x,y\n";
      for (int m = 0; m < kFamilyMembers; ++m) {
        const double t = f.domain().t.from_unit(static_cast<double>(m) / (kFamilyMembers - 1));
        for (int k = 0; k < kMemberSamples; ++k) {
          const double s = f.domain().s.from_unit(static_cast<double>(k) / (kMemberSamples - 1));
          const Point p = eval_family(f, s, t);
          poly << m << ',' << format_double(t) << ',' << format_double(s) << ',' << format_double(p.x()) << ','
               << format_double(p.y()) << '\n';
        }
      }
      write_file_atomic(sibling_path(out_path, "family"), poly.str());
    } else {
      err << "warning: result file carries no family; polylines skipped\n";
    }
    out << "wrote " << grid << " x " << grid << " grid to " << out_path << "\n";
    return kOk;
  });
}

int cmd_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Time assembly and SVD per degree", "bench");
  std::string family_path, degrees_text = "1..6", out_path;
  app.add_option("--family", family_path, "family file (JSON)")->required();
  app.add_option("--degrees", degrees_text, "range a..b or list a,b,c");
  app.add_option("--out", out_path, "CSV file to write");

  return guarded(app, args, out, err, [&] {
    const std::vector<int> degrees = parse_degrees(degrees_text);
    const RationalFamily f = parse_family(read_text_file(family_path));
    std::ostringstream csv;
    write_benchmark_csv(csv, benchmark(f, degrees));
    out << csv.str();
    if (!out_path.empty()) write_file_atomic(out_path, csv.str());
    return kOk;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static const char* usage =
      "usage: envimp <command> [flags]\n"
      "commands:\n"
      "  implicitize  --family F --degree D [--k1 K --k2 K] [--no-row-weighting] [--out R]\n"
      "  study        --family F --dmax D --imax I [--center s,t] [--out CSV]\n"
      "  contour      --result R --grid N [--box x0,y0,x1,y1] [--out CSV]\n"
      "  bench        --family F [--degrees 1..6] [--out CSV]\n";
  if (args.empty()) {
    err << usage;
    return kMalformedInput;
  }
  const std::string& cmd = args.front();
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  if (cmd == "implicitize") return cmd_implicitize(rest, out, err);
  if (cmd == "study") return cmd_study(rest, out, err);
  if (cmd == "contour") return cmd_contour(rest, out, err);
  if (cmd == "bench") return cmd_bench(rest, out, err);
  if (cmd == "-h" || cmd == "--help" || cmd == "help") {
    out << usage;
    return kOk;
  }
  err << "unknown command '" << cmd << "'\n" << usage;
  return kMalformedInput;
}

}  // namespace envimp::cli
