#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polyobs/linalg.hpp"

namespace polyobs {

using NonlinearityFn = std::function<Vector(const Vector&)>;

// Model files reference nonlinearities by name; the catalog maps names to
// callables. Built-ins:
//   "zero"            phi(z) = 0
//   "sin_plus_linear" phi(z)_i = sin(z_i) + z_i
const NonlinearityFn& nonlinearity(const std::string& id);

bool has_nonlinearity(const std::string& id);

// Registers an additional nonlinearity (mainly for tests). Re-registering a
// built-in name is rejected.
void register_nonlinearity(const std::string& id, NonlinearityFn fn);

std::vector<std::string> nonlinearity_ids();

}  // namespace polyobs
