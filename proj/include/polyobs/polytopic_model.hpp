#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyobs/linalg.hpp"
#include "polyobs/nonlinearity.hpp"

namespace polyobs {

// One vertex of the polytopic representation: the system matrices evaluated
// at a parameter-polytope vertex.
struct VertexBundle {
  Matrix E;  // n_x x n_x
  Matrix A;  // n_x x n_x
  Matrix B;  // n_x x n_u
  Matrix F;  // n_x x n_v
  Matrix G;  // n_x x n_phi
};

struct Dims {
  int n_x = 0;
  int n_u = 0;
  int n_y = 0;
  int n_v = 0;
  int n_w = 0;
  int n_phi = 0;
};

// Discrete-time polytopic nonlinear descriptor system
//
//   E(p_{k+1}) x_{k+1} = A(p_k) x_k + G(p_k) phi(H x_k) + B(p_k) u_k + F(p_k) v_k
//   y_k = C x_k + D w_k
//
// with [E A B F G](p) = sum_i xi_i(p) [E_i A_i B_i F_i G_i]. Immutable after
// construction; safe to share across concurrent readers.
class PolytopicDescriptorSystem {
 public:
  PolytopicDescriptorSystem(Dims dims, std::vector<VertexBundle> vertices, Matrix h,
                            Matrix c, Matrix d, Matrix lambda, std::string nonlinearity_id);

  const Dims& dims() const { return dims_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  const VertexBundle& vertex(int i) const { return vertices_.at(i); }
  const std::vector<VertexBundle>& vertices() const { return vertices_; }
  const Matrix& H() const { return h_; }
  const Matrix& C() const { return c_; }
  const Matrix& D() const { return d_; }
  const Matrix& Lambda() const { return lambda_; }
  const std::string& nonlinearity_id() const { return nonlinearity_id_; }

  // phi applied through the registered catalog entry.
  Vector phi(const Vector& z) const;

  // Convex combination of the vertex bundles with the given weights.
  // Requires weights >= -1e-12 elementwise and a sum within 1e-9 of one.
  VertexBundle evaluate(const Vector& xi) const;

  // True when every vertex shares the same E matrix (Assumption for Thm2).
  bool has_constant_E(double tol = 1e-12) const;

 private:
  Dims dims_;
  std::vector<VertexBundle> vertices_;
  Matrix h_, c_, d_, lambda_;
  std::string nonlinearity_id_;
};

// How coords() treats parameter values outside the polytope. The bundled
// case study drives the plant with parameters that leave the declared box,
// so the default projects onto it (componentwise for boxes) and warns once.
enum class ClampPolicy { Clamp, Reject };

// Parameter polytope with a simplex partition and the piecewise-barycentric
// weight functions xi_i. Immutable after construction.
class CoordinateMap {
 public:
  struct Simplex {
    // vertex_indices[0] is the base vertex; T columns are
    // vertex(k) - vertex(base) for k = 1..n_p.
    std::vector<int> vertex_indices;
    Matrix T;
  };

  // Simplex partition of an axis-aligned box. For n_p == 2 this produces the
  // 4-vertex, 2-triangle layout with vertices ordered
  //   v1 = (lo1, lo2), v2 = (hi1, hi2), v3 = (hi1, lo2), v4 = (lo1, hi2)
  // and simplices Co{v1,v3,v4}, Co{v2,v3,v4} split along Co{v3,v4}.
  // Other dimensions use the Kuhn triangulation (n_p! simplices).
  static CoordinateMap partition_box(const Vector& lower, const Vector& upper);

  // Degenerate single-vertex map (N = 1), xi(p) = (1).
  static CoordinateMap single_point(const Vector& p);

  // General constructor from explicit vertices and simplices.
  CoordinateMap(std::vector<Vector> vertex_points, std::vector<Simplex> simplices,
                std::optional<Vector> box_lower = std::nullopt,
                std::optional<Vector> box_upper = std::nullopt);

  int num_vertices() const { return static_cast<int>(vertex_points_.size()); }
  int dimension() const { return dim_; }
  int num_simplices() const { return static_cast<int>(simplices_.size()); }
  const Vector& vertex_point(int i) const { return vertex_points_.at(i); }
  const Simplex& simplex(int s) const { return simplices_.at(s); }
  bool has_box() const { return box_lower_.has_value(); }
  const Vector& box_lower() const { return *box_lower_; }
  const Vector& box_upper() const { return *box_upper_; }

  // Barycentric weight vector xi(p), length N. Simplices are tested in
  // declaration order with tolerance 1e-12, so points on a shared facet get
  // the weights of the earlier simplex (the half-open assignment).
  Vector coords(const Vector& p, ClampPolicy policy = ClampPolicy::Clamp) const;

  // Weight vector computed through simplex s regardless of membership
  // (used to probe continuity across shared facets).
  Vector simplex_coords(int s, const Vector& p) const;

  // Index of the simplex that coords() would use; -1 if p is outside.
  int locate_simplex(const Vector& p, double tol = 1e-12) const;

  bool contains(const Vector& p, double tol = 1e-9) const;

  // Componentwise projection onto the box; identity for boxless maps.
  Vector clamp_to_box(const Vector& p) const;

 private:
  int dim_ = 0;
  std::vector<Vector> vertex_points_;
  std::vector<Simplex> simplices_;
  std::vector<Eigen::PartialPivLU<Matrix>> lus_;
  std::optional<Vector> box_lower_, box_upper_;
};

struct SigmaLowerResult {
  double sigma;   // min over the grid of sigma_min(E(p))
  Vector argmin;  // grid point attaining it
};

// min_{p in P} sigma_min(E(p)) over a sampling grid: a componentwise grid of
// `grid_density` points per axis for box maps, a barycentric grid per simplex
// otherwise. Throws ModelError if a singular E(p) is encountered.
SigmaLowerResult min_singular_value_E(const PolytopicDescriptorSystem& sys,
                                      const CoordinateMap& map, int grid_density);

}  // namespace polyobs
