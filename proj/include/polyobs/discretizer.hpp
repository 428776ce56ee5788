#pragma once

#include <string>
#include <vector>

#include "polyobs/polytopic_model.hpp"

namespace polyobs {

// One vertex of a continuous-time descriptor model
//   E_c(p) dx/dt = A_c(p) x + G_c(p) phi(H x) + B_c(p) u + F_c(p) v.
struct ContinuousVertexBundle {
  Matrix E;  // E_c, n_x x n_x
  Matrix A;  // A_c, n_x x n_x
  Matrix B;  // n_x x n_u
  Matrix F;  // n_x x n_v
  Matrix G;  // n_x x n_phi
};

struct ContinuousModel {
  Dims dims;
  std::vector<ContinuousVertexBundle> vertices;
  Matrix H, C, D, Lambda;
  std::string nonlinearity_id;
};

struct GeneralizedEigCheck {
  bool ok;        // margin > 1e-10
  double margin;  // sigma_min(E_c - theta * A_c)
};

// Diagnostic for the discretization pole condition: theta must not hit a
// generalized eigenvalue of (A_c, E_c), i.e. E_c - theta*A_c stays nonsingular.
GeneralizedEigCheck check_generalized_eigs(const ContinuousVertexBundle& ct, double theta);

// Semi-implicit (Tustin) discretization with sampling period ts, applied
// vertexwise with theta = ts/2:
//
//   E = E_c - theta A_c,   A = E_c + theta A_c,
//   B = ts B_c,            F = ts F_c,           G = ts G_c.
//
// The bilinear map covers the (E, A) pair; the input, disturbance and
// nonlinearity channels use forward-Euler scaling at the left endpoint.
PolytopicDescriptorSystem tustin(const ContinuousModel& ct, double ts);

}  // namespace polyobs
