#include "cpair/json_io.hpp"

#include <fstream>

#include "cpair/errors.hpp"

namespace cpair {

using nlohmann::json;

json matrix_to_json(const CMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidMatrix("matrix JSON requires a square matrix");
  json re = json::array(), im = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ir = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return json{{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re"))
    throw InvalidMatrix("matrix JSON needs fields n and re");
  if (!j["n"].is_number_integer() || j["n"].get<long>() < 1) throw InvalidMatrix("n must be a positive integer");
  const Index n = j["n"].get<Index>();
  auto read = [&](const json& rows, const char* name, bool real_part, CMatrix& m) {
    if (!rows.is_array() || static_cast<Index>(rows.size()) != n)
      throw InvalidMatrix(std::string(name) + " must have n rows");
    for (Index r = 0; r < n; ++r) {
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != n)
        throw InvalidMatrix(std::string(name) + " rows must have n entries");
      for (Index c = 0; c < n; ++c) {
        const json& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) throw InvalidMatrix(std::string(name) + " entries must be numbers");
        if (real_part)
          m(r, c) = cplx(v.get<double>(), m(r, c).imag());
        else
          m(r, c) = cplx(m(r, c).real(), v.get<double>());
      }
    }
  };
  CMatrix m = CMatrix::Zero(n, n);
  read(j["re"], "re", true, m);
  if (j.contains("im")) read(j["im"], "im", false, m);
  require_finite(m, "matrix JSON");
  return m;
}

HermitianMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open matrix file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidMatrix("'" + path + "' is not valid JSON: " + e.what());
  }
  return checked_hermitian(matrix_from_json(j));
}

void write_matrix_file(const std::string& path, const CMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot write '" + path + "'");
  out << matrix_to_json(m).dump() << '\n';
}

json vector_to_json(const RVector& v) {
  json a = json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

}  // namespace cpair
