#include "polyobs/json_util.hpp"

#include <cmath>
#include <fstream>

#include "polyobs/errors.hpp"

namespace polyobs {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Matrix matrix_from_json(const json& j, const std::string& name, Eigen::Index rows,
                        Eigen::Index cols) {
  if (!j.is_array()) throw IoError(name + ": expected an array of rows");
  const Eigen::Index r = static_cast<Eigen::Index>(j.size());
  Eigen::Index c = 0;
  if (r > 0) {
    if (!j[0].is_array()) throw IoError(name + ": expected nested arrays (rows)");
    c = static_cast<Eigen::Index>(j[0].size());
  } else {
    c = cols >= 0 ? cols : 0;
  }
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != c)
      throw IoError(name + ": ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) {
      if (!j[i][k].is_number()) throw IoError(name + ": entries must be numbers");
      const double v = j[i][k].get<double>();
      if (!std::isfinite(v)) throw IoError(name + ": entries must be finite");
      m(i, k) = v;
    }
  }
  if (rows >= 0 && m.rows() != rows)
    throw IoError(name + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(m.rows()));
  if (cols >= 0 && m.cols() != cols)
    throw IoError(name + ": expected " + std::to_string(cols) + " cols, got " + std::to_string(m.cols()));
  return m;
}

Vector vector_from_json(const json& j, const std::string& name, Eigen::Index size) {
  if (!j.is_array()) throw IoError(name + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) throw IoError(name + ": entries must be numbers");
    const double x = j[i].get<double>();
    if (!std::isfinite(x)) throw IoError(name + ": entries must be finite");
    v[i] = x;
  }
  if (size >= 0 && v.size() != size)
    throw IoError(name + ": expected length " + std::to_string(size) + ", got " + std::to_string(v.size()));
  return v;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw IoError("cannot parse " + path + ": " + ex.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace polyobs
