#include "whf/json_io.h"

#include <fstream>
#include <sstream>

#include "whf/errors.h"

namespace whf {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

[[noreturn]] void shape_error(const std::string& name, const std::string& why) {
  throw Error(ErrorCode::kShapeMismatch, name + ": " + why);
}

Complex entry_from_json(const Json& e, const std::string& name) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return Complex(e[0].get<double>(), e[1].get<double>());
  }
  throw Error(ErrorCode::kParseError,
              name + ": entries must be [re, im] pairs");
}

}  // namespace

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& name) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kParseError, name + ": expected an array of rows");
  }
  const auto r = static_cast<Eigen::Index>(j.size());
  if (r == 0) {
    if (rows > 0 && cols != 0) shape_error(name, "missing rows");
    return Matrix(std::max<Eigen::Index>(rows, 0),
                  std::max<Eigen::Index>(cols, 0));
  }
  if (rows >= 0 && r != rows) {
    shape_error(name, "expected " + std::to_string(rows) + " rows, got " +
                          std::to_string(r));
  }
  if (!j[0].is_array()) {
    throw Error(ErrorCode::kParseError, name + ": rows must be arrays");
  }
  const auto c = static_cast<Eigen::Index>(j[0].size());
  if (cols >= 0 && c != cols) {
    shape_error(name, "expected " + std::to_string(cols) + " columns, got " +
                          std::to_string(c));
  }
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      shape_error(name, "ragged rows");
    }
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = entry_from_json(row[k], name);
  }
  return m;
}

Json realization_to_json(const TwoSidedRealization& r) {
  Json j;
  j["m"] = r.m();
  j["R0"] = matrix_to_json(r.R0);
  j["plus"] = {{"A", matrix_to_json(r.A)},
               {"B", matrix_to_json(r.B)},
               {"C", matrix_to_json(r.C)}};
  j["minus"] = {{"alpha", matrix_to_json(r.alpha)},
                {"beta", matrix_to_json(r.beta)},
                {"gamma", matrix_to_json(r.gamma)}};
  return j;
}

TwoSidedRealization realization_from_json(const Json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParseError, "realization must be a JSON object");
  }
  if (!j.contains("m") || !j["m"].is_number_integer() ||
      j["m"].get<long long>() < 0) {
    throw Error(ErrorCode::kParseError, "field \"m\" must be an integer >= 0");
  }
  if (!j.contains("R0")) {
    throw Error(ErrorCode::kParseError, "missing field \"R0\"");
  }
  const auto dim = static_cast<Eigen::Index>(j["m"].get<long long>());

  auto part = [&](const char* key) -> Json {
    if (!j.contains(key)) return Json::object();
    if (!j[key].is_object()) {
      throw Error(ErrorCode::kParseError,
                  std::string("field \"") + key + "\" must be an object");
    }
    return j[key];
  };
  auto field = [](const Json& p, const char* key) -> Json {
    return p.contains(key) ? p[key] : Json::array();
  };

  TwoSidedRealization r;
  r.R0 = matrix_from_json(j["R0"], dim, dim, "R0");
  const Json plus = part("plus");
  const Json minus = part("minus");
  const Eigen::Index np = static_cast<Eigen::Index>(field(plus, "A").size());
  r.A = matrix_from_json(field(plus, "A"), np, np, "plus.A");
  r.B = matrix_from_json(field(plus, "B"), np, dim, "plus.B");
  r.C = matrix_from_json(field(plus, "C"), dim, np, "plus.C");

  const Eigen::Index nm =
      static_cast<Eigen::Index>(field(minus, "alpha").size());
  r.alpha = matrix_from_json(field(minus, "alpha"), nm, nm, "minus.alpha");
  r.beta = matrix_from_json(field(minus, "beta"), nm, dim, "minus.beta");
  r.gamma = matrix_from_json(field(minus, "gamma"), dim, nm, "minus.gamma");
  check_shapes(r);
  return r;
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                origin + ": malformed JSON at byte " + std::to_string(e.byte) +
                    " (" + e.what() + ")");
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot open " + path.string() + " for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot open " + path.string() + " for writing");
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument, "failed writing " + path.string());
  }
}

TwoSidedRealization load_realization(const std::filesystem::path& path) {
  return realization_from_json(read_json_file(path));
}

void save_realization(const std::filesystem::path& path,
                      const TwoSidedRealization& r) {
  write_json_file(path, realization_to_json(r));
}

Json indices_to_json(const WienerHopfIndices& w) {
  Json j;
  j["negatives"] = w.negatives;
  j["zeros"] = w.zeros;
  j["positives"] = w.positives;
  return j;
}

Json report_residuals(const VerificationReport& rep) {
  Json j = Json::object();
  for (const Check& c : rep.checks) {
    if (c.applicable) j[c.name] = c.value;
    else j[c.name] = nullptr;
  }
  return j;
}

Json bi_inner_to_json(const BiInnerRealization& g) {
  Json j;
  j["A"] = matrix_to_json(g.A);
  j["B"] = matrix_to_json(g.B);
  j["C"] = matrix_to_json(g.C);
  j["D"] = matrix_to_json(g.D);
  j["systemMatrixUnitary"] = g.systemMatrixUnitary;
  return j;
}

}  // namespace whf
