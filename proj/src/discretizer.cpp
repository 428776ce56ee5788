#include "polyobs/discretizer.hpp"

#include <string>

#include "polyobs/errors.hpp"

namespace polyobs {

GeneralizedEigCheck check_generalized_eigs(const ContinuousVertexBundle& ct, double theta) {
  const double margin = min_singular_value(ct.E - theta * ct.A);
  return {margin > 1e-10, margin};
}

PolytopicDescriptorSystem tustin(const ContinuousModel& ct, double ts) {
  if (!(ts > 0.0)) throw ModelError("sampling period must be positive");
  const double theta = ts / 2.0;
  std::vector<VertexBundle> dt;
  dt.reserve(ct.vertices.size());
  for (std::size_t i = 0; i < ct.vertices.size(); ++i) {
    const auto& v = ct.vertices[i];
    const auto chk = check_generalized_eigs(v, theta);
    if (!chk.ok)
      throw ModelError("theta = ts/2 hits a generalized eigenvalue at vertex " +
                       std::to_string(i + 1) + " (margin " + std::to_string(chk.margin) + ")");
    VertexBundle d;
    d.E = v.E - theta * v.A;
    d.A = v.E + theta * v.A;
    d.B = ts * v.B;
    d.F = ts * v.F;
    d.G = ts * v.G;
    dt.push_back(std::move(d));
  }
  return PolytopicDescriptorSystem(ct.dims, std::move(dt), ct.H, ct.C, ct.D, ct.Lambda,
                                   ct.nonlinearity_id);
}

}  // namespace polyobs
