#include "polyobs/nonlinearity.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "polyobs/errors.hpp"

namespace polyobs {

namespace {

struct Catalog {
  std::map<std::string, NonlinearityFn> fns;
  std::mutex mutex;

  Catalog() {
    fns["zero"] = [](const Vector& z) { return Vector(Vector::Zero(z.size())); };
    fns["sin_plus_linear"] = [](const Vector& z) {
      Vector out(z.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = std::sin(z[i]) + z[i];
      return out;
    };
  }
};

Catalog& catalog() {
  static Catalog c;
  return c;
}

}  // namespace

const NonlinearityFn& nonlinearity(const std::string& id) {
  auto& c = catalog();
  std::lock_guard<std::mutex> lock(c.mutex);
  auto it = c.fns.find(id);
  if (it == c.fns.end()) throw ModelError("unknown nonlinearity id: '" + id + "'");
  return it->second;
}

bool has_nonlinearity(const std::string& id) {
  auto& c = catalog();
  std::lock_guard<std::mutex> lock(c.mutex);
  return c.fns.count(id) > 0;
}

void register_nonlinearity(const std::string& id, NonlinearityFn fn) {
  auto& c = catalog();
  std::lock_guard<std::mutex> lock(c.mutex);
  if ((id == "zero" || id == "sin_plus_linear") && c.fns.count(id))
    throw ModelError("cannot replace built-in nonlinearity '" + id + "'");
  c.fns[id] = std::move(fn);
}

std::vector<std::string> nonlinearity_ids() {
  auto& c = catalog();
  std::lock_guard<std::mutex> lock(c.mutex);
  std::vector<std::string> out;
  out.reserve(c.fns.size());
  for (const auto& [k, v] : c.fns) out.push_back(k);
  return out;
}

}  // namespace polyobs
