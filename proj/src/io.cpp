#include "envimp/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

#include "envimp/errors.hpp"

namespace envimp {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidInput("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InvalidInput(std::string("missing key '") + key + "'");
  return doc.at(key);
}

double number(const json& v, const std::string& what) {
  if (v.is_string()) return parse_double(v.get<std::string>());
  if (!v.is_number()) throw InvalidInput(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidInput(what + " must be finite");
  return x;
}

int integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw InvalidInput(what + " must be an integer");
  return v.get<int>();
}

std::pair<int, int> int_pair(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) throw InvalidInput(what + " must be a pair of integers");
  return {integer(v[0], what), integer(v[1], what)};
}

Interval interval(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) throw InvalidInput(what + " must be [lo, hi]");
  Interval iv{number(v[0], what), number(v[1], what)};
  if (!(iv.hi > iv.lo)) throw InvalidInput(what + " must satisfy lo < hi");
  return iv;
}

Rect rect(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) throw InvalidInput(what + " must be [[s_lo, s_hi], [t_lo, t_hi]]");
  return {interval(v[0], what + "[0]"), interval(v[1], what + "[1]")};
}

json rect_json(const Rect& r) { return json::array({{r.s.lo, r.s.hi}, {r.t.lo, r.t.hi}}); }

BiPoly matrix(const json& v, int n1, int n2, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != n1 + 1) {
    throw InvalidInput(what + " must have " + std::to_string(n1 + 1) + " rows");
  }
  Eigen::MatrixXd m(n1 + 1, n2 + 1);
  for (int i = 0; i <= n1; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n2 + 1) {
      throw InvalidInput(what + " row " + std::to_string(i) + " must have " + std::to_string(n2 + 1) + " entries");
    }
    for (int j = 0; j <= n2; ++j) m(i, j) = number(row[j], what);
  }
  return BiPoly(std::move(m));
}

json matrix_json(const BiPoly& p) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < p.coeffs().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < p.coeffs().cols(); ++j) row.push_back(p.coeffs()(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector(const json& v, const std::string& what) {
  if (!v.is_array()) throw InvalidInput(what + " must be an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<Eigen::Index>(k)] = number(v[k], what);
  return out;
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json extended_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

RationalFamily family_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("family document must be an object");
  const auto [n1, n2] = int_pair(require(doc, "bidegree"), "bidegree");
  if (n1 < 0 || n2 < 0) throw InvalidInput("bidegree must be nonnegative");
  BiPoly x = matrix(require(doc, "x"), n1, n2, "x");
  BiPoly y = matrix(require(doc, "y"), n1, n2, "y");
  BiPoly w = matrix(require(doc, "w"), n1, n2, "w");
  const Rect domain = rect(require(doc, "domain"), "domain");
  return RationalFamily(std::move(x), std::move(y), std::move(w), domain);
}

json family_to_json(const RationalFamily& f) {
  return json{{"bidegree", {f.n1(), f.n2()}},
              {"x", matrix_json(f.x())},
              {"y", matrix_json(f.y())},
              {"w", matrix_json(f.w())},
              {"domain", rect_json(f.domain())}};
}

RationalFamily parse_family(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("family file is not valid JSON: ") + e.what());
  }
  return family_from_json(doc);
}

json result_to_json(const ResultFile& r) {
  const ImplicitApproximation& a = r.approx;
  const Triangle& tri = a.spec.triangle;
  json doc{
      {"tool_version", r.tool_version},
      {"degree", a.spec.degree},
      {"triangle", {{tri.v[0].x(), tri.v[0].y()}, {tri.v[1].x(), tri.v[1].y()}, {tri.v[2].x(), tri.v[2].y()}}},
      {"c_q", vector_json(a.c_q)},
      {"lambda_bidegree", {a.spec.k1, a.spec.k2}},
      {"lambda_domain", rect_json(a.spec.lambda_domain)},
      {"c_lambda", vector_json(a.c_lambda)},
      {"sigma_min", a.sigma_min},
      {"sigma_gap", extended_number(a.sigma_gap)},
      {"working_bidegree", {a.spec.L1, a.spec.L2}},
      {"matrix", {{"rows", a.rows}, {"cols", a.cols}, {"padded_rows", a.padded_rows}}},
      {"row_weighting", a.row_weighting},
      {"domain", rect_json(a.domain)},
      {"family_fingerprint", a.family_fingerprint},
      {"input_fingerprint", r.input_fingerprint},
  };
  if (r.family) doc["family"] = family_to_json(*r.family);
  return doc;
}

ResultFile result_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("result document must be an object");
  ResultFile r;
  ImplicitApproximation& a = r.approx;
  a.spec.degree = integer(require(doc, "degree"), "degree");
  if (a.spec.degree < 1) throw InvalidInput("degree must be >= 1");

  const json& tri = require(doc, "triangle");
  if (!tri.is_array() || tri.size() != 3) throw InvalidInput("triangle must have 3 vertices");
  for (int k = 0; k < 3; ++k) {
    if (!tri[k].is_array() || tri[k].size() != 2) throw InvalidInput("triangle vertex must be [x, y]");
    a.spec.triangle.v[k] = Point(number(tri[k][0], "triangle"), number(tri[k][1], "triangle"));
  }
  if (a.spec.triangle.is_degenerate()) throw InvalidInput("triangle is degenerate");

  std::tie(a.spec.k1, a.spec.k2) = int_pair(require(doc, "lambda_bidegree"), "lambda_bidegree");
  std::tie(a.spec.L1, a.spec.L2) = int_pair(require(doc, "working_bidegree"), "working_bidegree");
  a.spec.lambda_domain = rect(require(doc, "lambda_domain"), "lambda_domain");
  a.c_q = vector(require(doc, "c_q"), "c_q");
  a.c_lambda = vector(require(doc, "c_lambda"), "c_lambda");
  if (a.c_q.size() != a.spec.num_q()) throw InvalidInput("c_q length does not match degree");
  if (a.c_lambda.size() != a.spec.num_lambda()) throw InvalidInput("c_lambda length does not match lambda_bidegree");
  a.sigma_min = number(require(doc, "sigma_min"), "sigma_min");
  a.sigma_gap = number(require(doc, "sigma_gap"), "sigma_gap");
  const json& mat = require(doc, "matrix");
  a.rows = integer(require(mat, "rows"), "matrix.rows");
  a.cols = integer(require(mat, "cols"), "matrix.cols");
  a.padded_rows = mat.contains("padded_rows") ? integer(mat.at("padded_rows"), "matrix.padded_rows") : 0;
  a.row_weighting = doc.value("row_weighting", true);
  a.domain = doc.contains("domain") ? rect(doc.at("domain"), "domain") : a.spec.lambda_domain;
  a.family_fingerprint = doc.value("family_fingerprint", std::string());
  r.input_fingerprint = doc.value("input_fingerprint", std::string());
  r.tool_version = doc.value("tool_version", std::string());
  if (doc.contains("family")) r.family = family_from_json(doc.at("family"));
  return r;
}

std::string serialize_result(const ResultFile& r) { return result_to_json(r).dump(2) + "\n"; }

ResultFile parse_result(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("result file is not valid JSON: ") + e.what());
  }
  try {
    return result_from_json(doc);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed result file: ") + e.what());
  }
}

}  // namespace envimp
