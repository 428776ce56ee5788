#pragma once

#include <string>

#include "polyobs/model_io.hpp"
#include "polyobs/polytopic_model.hpp"

namespace polyobs::testing {

inline std::string data_path(const std::string& name) {
  return std::string(POLYOBS_DATA_DIR) + "/" + name;
}

// The bundled two-parameter benchmark model, affine in p on each simplex:
//   E(p) = [1+p2/2, p2/2-2p1; p2, 1+p2]   A(p) = [1-p2/2, 2p1-p2/2; -p2, 1-p2]
//   G(p) = [p2; 2p2]   B(p) = F(p) = p1*[1;1]
// on the box [9.5e-3, 10.5e-3] x [0.0475, 0.0525].
struct Example1Oracle {
  static Matrix E(double p1, double p2) {
    Matrix m(2, 2);
    m << 1 + p2 / 2, p2 / 2 - 2 * p1, p2, 1 + p2;
    return m;
  }
  static Matrix A(double p1, double p2) {
    Matrix m(2, 2);
    m << 1 - p2 / 2, 2 * p1 - p2 / 2, -p2, 1 - p2;
    return m;
  }
  static Matrix G(double /*p1*/, double p2) {
    Matrix m(2, 1);
    m << p2, 2 * p2;
    return m;
  }
  static Matrix B(double p1, double /*p2*/) {
    Matrix m(2, 1);
    m << p1, p1;
    return m;
  }
};

inline LoadedModel load_example1() { return load_model(data_path("example1.json")); }
inline LoadedModel load_example1_const_E() { return load_model(data_path("example1_const_E.json")); }

// Scalar system with no output information (C = 0) and unstable dynamics:
// no observer can stabilize the error, so synthesis must be infeasible.
inline PolytopicDescriptorSystem make_unobservable_scalar() {
  Dims d;
  d.n_x = 1;
  d.n_u = 0;
  d.n_y = 1;
  d.n_v = 1;
  d.n_w = 1;
  d.n_phi = 0;
  VertexBundle v;
  v.E = Matrix::Constant(1, 1, 1.0);
  v.A = Matrix::Constant(1, 1, 2.0);
  v.B = Matrix(1, 0);
  v.F = Matrix::Zero(1, 1);
  v.G = Matrix(1, 0);
  return PolytopicDescriptorSystem(d, {v}, Matrix(0, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                                   Matrix(0, 0), "zero");
}

// Scalar dead-beat instance: A = 0, so the error resets in one step even
// with zero gains.
inline PolytopicDescriptorSystem make_deadbeat_scalar() {
  Dims d;
  d.n_x = 1;
  d.n_u = 0;
  d.n_y = 1;
  d.n_v = 1;
  d.n_w = 1;
  d.n_phi = 0;
  VertexBundle v;
  v.E = Matrix::Constant(1, 1, 1.0);
  v.A = Matrix::Zero(1, 1);
  v.B = Matrix(1, 0);
  v.F = Matrix::Constant(1, 1, 1.0);
  v.G = Matrix(1, 0);
  return PolytopicDescriptorSystem(d, {v}, Matrix(0, 1), Matrix::Constant(1, 1, 1.0),
                                   Matrix::Constant(1, 1, 1.0), Matrix(0, 0), "zero");
}

}  // namespace polyobs::testing
