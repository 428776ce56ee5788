#pragma once

#include <string>

#include <json.hpp>

#include "polyobs/linalg.hpp"

namespace polyobs {

using json = nlohmann::json;

// Matrices travel as row-major nested arrays of finite doubles.
json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);

// rows/cols < 0 means "take whatever the document says"; otherwise the shape
// is enforced. The name is used in error messages only.
Matrix matrix_from_json(const json& j, const std::string& name, Eigen::Index rows = -1,
                        Eigen::Index cols = -1);
Vector vector_from_json(const json& j, const std::string& name, Eigen::Index size = -1);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace polyobs
