#include "polyobs/polytopic_model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "polyobs/errors.hpp"

namespace polyobs {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void warn_clamped_once() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    std::cerr << "[polyobs] warning: parameter outside the declared polytope; "
                 "clamping to the box (policy Clamp). Further clamps are silent.\n";
  });
}

}  // namespace

PolytopicDescriptorSystem::PolytopicDescriptorSystem(Dims dims, std::vector<VertexBundle> vertices,
                                                     Matrix h, Matrix c, Matrix d, Matrix lambda,
                                                     std::string nonlinearity_id)
    : dims_(dims),
      vertices_(std::move(vertices)),
      h_(std::move(h)),
      c_(std::move(c)),
      d_(std::move(d)),
      lambda_(std::move(lambda)),
      nonlinearity_id_(std::move(nonlinearity_id)) {
  if (vertices_.empty()) throw ModelError("system needs at least one vertex");
  require(dims_.n_x > 0, "n_x must be positive");
  require(dims_.n_u >= 0 && dims_.n_y >= 0 && dims_.n_v >= 0 && dims_.n_w >= 0 && dims_.n_phi >= 0,
          "dimensions must be nonnegative");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& v = vertices_[i];
    const std::string at = " at vertex " + std::to_string(i + 1);
    require(v.E.rows() == dims_.n_x && v.E.cols() == dims_.n_x, "E is " + shape(v.E) + at);
    require(v.A.rows() == dims_.n_x && v.A.cols() == dims_.n_x, "A is " + shape(v.A) + at);
    require(v.B.rows() == dims_.n_x && v.B.cols() == dims_.n_u, "B is " + shape(v.B) + at);
    require(v.F.rows() == dims_.n_x && v.F.cols() == dims_.n_v, "F is " + shape(v.F) + at);
    require(v.G.rows() == dims_.n_x && v.G.cols() == dims_.n_phi, "G is " + shape(v.G) + at);
    if (!is_finite(v.E) || !is_finite(v.A) || !is_finite(v.B) || !is_finite(v.F) || !is_finite(v.G))
      throw ModelError("non-finite entry" + at);
  }
  require(h_.rows() == dims_.n_phi && h_.cols() == dims_.n_x, "H is " + shape(h_));
  require(c_.rows() == dims_.n_y && c_.cols() == dims_.n_x, "C is " + shape(c_));
  require(d_.rows() == dims_.n_y && d_.cols() == dims_.n_w, "D is " + shape(d_));
  require(lambda_.rows() == dims_.n_phi && lambda_.cols() == dims_.n_phi,
          "Lambda is " + shape(lambda_));
  if (dims_.n_phi > 0) {
    if ((lambda_ - lambda_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ModelError("Lambda must be symmetric");
    if (min_eigenvalue(symmetrize(lambda_)) <= 0.0)
      throw ModelError("Lambda must be positive definite");
  }
  if (!has_nonlinearity(nonlinearity_id_))
    throw ModelError("unknown nonlinearity id: '" + nonlinearity_id_ + "'");
  // E must be nonsingular at every vertex; interior points are checked by
  // min_singular_value_E when a coordinate map is available.
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (min_singular_value(vertices_[i].E) < 1e-12)
      throw ModelError("E is singular at vertex " + std::to_string(i + 1));
  }
}

Vector PolytopicDescriptorSystem::phi(const Vector& z) const {
  if (z.size() != dims_.n_phi) throw DimensionError("phi argument has wrong length");
  Vector out = nonlinearity(nonlinearity_id_)(z);
  if (out.size() != dims_.n_phi) throw ModelError("nonlinearity returned wrong length");
  return out;
}

VertexBundle PolytopicDescriptorSystem::evaluate(const Vector& xi) const {
  const int n = num_vertices();
  if (xi.size() != n) throw DimensionError("weight vector length != number of vertices");
  if (xi.minCoeff() < -1e-12) throw ModelError("weights must be nonnegative");
  if (std::abs(xi.sum() - 1.0) > 1e-9) throw ModelError("weights must sum to one");
  VertexBundle out;
  out.E = Matrix::Zero(dims_.n_x, dims_.n_x);
  out.A = Matrix::Zero(dims_.n_x, dims_.n_x);
  out.B = Matrix::Zero(dims_.n_x, dims_.n_u);
  out.F = Matrix::Zero(dims_.n_x, dims_.n_v);
  out.G = Matrix::Zero(dims_.n_x, dims_.n_phi);
  for (int i = 0; i < n; ++i) {
    const double w = xi[i];
    if (w == 0.0) continue;
    out.E += w * vertices_[i].E;
    out.A += w * vertices_[i].A;
    out.B += w * vertices_[i].B;
    out.F += w * vertices_[i].F;
    out.G += w * vertices_[i].G;
  }
  return out;
}

bool PolytopicDescriptorSystem::has_constant_E(double tol) const {
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    if ((vertices_[i].E - vertices_[0].E).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

CoordinateMap::CoordinateMap(std::vector<Vector> vertex_points, std::vector<Simplex> simplices,
                             std::optional<Vector> box_lower, std::optional<Vector> box_upper)
    : vertex_points_(std::move(vertex_points)),
      simplices_(std::move(simplices)),
      box_lower_(std::move(box_lower)),
      box_upper_(std::move(box_upper)) {
  if (vertex_points_.empty()) throw ModelError("coordinate map needs at least one vertex");
  dim_ = static_cast<int>(vertex_points_[0].size());
  for (const auto& v : vertex_points_)
    if (v.size() != dim_) throw DimensionError("inconsistent vertex point dimensions");
  if (simplices_.empty() && vertex_points_.size() > 1)
    throw ModelError("multi-vertex map needs at least one simplex");
  lus_.reserve(simplices_.size());
  for (const auto& s : simplices_) {
    if (static_cast<int>(s.vertex_indices.size()) != dim_ + 1)
      throw DimensionError("simplex must list n_p + 1 vertex indices");
    for (int idx : s.vertex_indices)
      if (idx < 0 || idx >= num_vertices()) throw ModelError("simplex vertex index out of range");
    if (s.T.rows() != dim_ || s.T.cols() != dim_) throw DimensionError("simplex transform must be n_p x n_p");
    Eigen::PartialPivLU<Matrix> lu(s.T);
    // |det| as a cheap degeneracy test; barycentric transforms on sane
    // polytopes are far from this threshold.
    if (std::abs(lu.determinant()) < 1e-300) throw ModelError("degenerate simplex (singular transform)");
    lus_.push_back(std::move(lu));
  }
}

CoordinateMap CoordinateMap::partition_box(const Vector& lower, const Vector& upper) {
  const int d = static_cast<int>(lower.size());
  if (upper.size() != d) throw DimensionError("box corners have different dimensions");
  if (d < 1) throw ModelError("box must have at least one dimension");
  for (int a = 0; a < d; ++a)
    if (!(lower[a] < upper[a])) throw ModelError("box is empty or degenerate: need lower < upper");

  std::vector<Vector> pts;
  std::vector<Simplex> simps;

  if (d == 2) {
    Vector v1(2), v2(2), v3(2), v4(2);
    v1 << lower[0], lower[1];
    v2 << upper[0], upper[1];
    v3 << upper[0], lower[1];
    v4 << lower[0], upper[1];
    pts = {v1, v2, v3, v4};
    for (int base : {0, 1}) {
      Simplex s;
      s.vertex_indices = {base, 2, 3};
      s.T.resize(2, 2);
      s.T.col(0) = pts[2] - pts[base];
      s.T.col(1) = pts[3] - pts[base];
      simps.push_back(std::move(s));
    }
    return CoordinateMap(std::move(pts), std::move(simps), lower, upper);
  }

  // Kuhn triangulation: 2^d corner vertices (binary order, bit a set means
  // upper on axis a) and d! simplices, one per axis permutation. Simplex for
  // permutation pi has the vertex chain c_0 = lower, c_k = c_{k-1} + e_pi(k).
  const int corners = 1 << d;
  pts.reserve(corners);
  for (int m = 0; m < corners; ++m) {
    Vector v(d);
    for (int a = 0; a < d; ++a) v[a] = (m >> a) & 1 ? upper[a] : lower[a];
    pts.push_back(std::move(v));
  }
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    Simplex s;
    s.vertex_indices.resize(d + 1);
    int mask = 0;
    s.vertex_indices[0] = 0;
    for (int k = 0; k < d; ++k) {
      mask |= 1 << perm[k];
      s.vertex_indices[k + 1] = mask;
    }
    s.T.resize(d, d);
    for (int k = 1; k <= d; ++k) s.T.col(k - 1) = pts[s.vertex_indices[k]] - pts[0];
    simps.push_back(std::move(s));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return CoordinateMap(std::move(pts), std::move(simps), lower, upper);
}

CoordinateMap CoordinateMap::single_point(const Vector& p) {
  return CoordinateMap({p}, {}, std::nullopt, std::nullopt);
}

Vector CoordinateMap::simplex_coords(int s, const Vector& p) const {
  const auto& sp = simplices_.at(s);
  Vector local = lus_[s].solve(p - vertex_points_[sp.vertex_indices[0]]);
  Vector xi = Vector::Zero(num_vertices());
  xi[sp.vertex_indices[0]] = 1.0 - local.sum();
  for (int k = 1; k <= dim_; ++k) xi[sp.vertex_indices[k]] += local[k - 1];
  return xi;
}

int CoordinateMap::locate_simplex(const Vector& p, double tol) const {
  for (int s = 0; s < num_simplices(); ++s) {
    const auto& sp = simplices_[s];
    Vector local = lus_[s].solve(p - vertex_points_[sp.vertex_indices[0]]);
    if (local.minCoeff() >= -tol && local.sum() <= 1.0 + tol) return s;
  }
  return -1;
}

bool CoordinateMap::contains(const Vector& p, double tol) const {
  if (p.size() != dim_) return false;
  if (num_vertices() == 1) return (p - vertex_points_[0]).cwiseAbs().maxCoeff() <= tol;
  if (has_box()) {
    for (int a = 0; a < dim_; ++a)
      if (p[a] < (*box_lower_)[a] - tol || p[a] > (*box_upper_)[a] + tol) return false;
    return true;
  }
  return locate_simplex(p, tol) >= 0;
}

Vector CoordinateMap::clamp_to_box(const Vector& p) const {
  if (!has_box()) return p;
  return p.cwiseMax(*box_lower_).cwiseMin(*box_upper_);
}

Vector CoordinateMap::coords(const Vector& p, ClampPolicy policy) const {
  if (p.size() != dim_) throw DimensionError("parameter point has wrong dimension");
  if (num_vertices() == 1) {
    if (!contains(p) && policy == ClampPolicy::Reject)
      throw ModelError("parameter outside the (single-point) polytope");
    return Vector::Ones(1);
  }
  Vector q = p;
  if (!contains(q)) {
    if (policy == ClampPolicy::Reject || !has_box())
      throw ModelError("parameter outside the polytope and clamping is disabled or unavailable");
    warn_clamped_once();
    q = clamp_to_box(q);
  }
  int s = locate_simplex(q, 1e-12);
  if (s < 0) {
    // Roundoff can leave a boundary point marginally outside every simplex;
    // fall back to the simplex with the least-negative local coordinate.
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < num_simplices(); ++t) {
      const auto& sp = simplices_[t];
      Vector local = lus_[t].solve(q - vertex_points_[sp.vertex_indices[0]]);
      double score = std::min(local.minCoeff(), 1.0 - local.sum());
      if (score > best) {
        best = score;
        s = t;
      }
    }
    if (s < 0 || best < -1e-9) throw ModelError("parameter outside the polytope");
  }
  return simplex_coords(s, q);
}

SigmaLowerResult min_singular_value_E(const PolytopicDescriptorSystem& sys,
                                      const CoordinateMap& map, int grid_density) {
  if (grid_density < 2) throw ModelError("grid_density must be at least 2 per axis");
  if (sys.num_vertices() != map.num_vertices())
    throw DimensionError("system and coordinate map disagree on N");

  SigmaLowerResult best{std::numeric_limits<double>::infinity(), Vector()};
  auto consider = [&](const Vector& p) {
    Vector xi = map.coords(p, ClampPolicy::Reject);
    const double s = min_singular_value(sys.evaluate(xi).E);
    if (s < 1e-12) {
      std::ostringstream os;
      os << "model violation: E(p) is singular near p = [" << p.transpose() << "]";
      throw ModelError(os.str());
    }
    if (s < best.sigma) {
      best.sigma = s;
      best.argmin = p;
    }
  };

  if (map.num_vertices() == 1) {
    consider(map.vertex_point(0));
    return best;
  }

  if (map.has_box()) {
    const int d = map.dimension();
    const Vector& lo = map.box_lower();
    const Vector& hi = map.box_upper();
    std::vector<int> idx(d, 0);
    while (true) {
      Vector p(d);
      for (int a = 0; a < d; ++a)
        p[a] = lo[a] + (hi[a] - lo[a]) * idx[a] / double(grid_density - 1);
      consider(p);
      int a = 0;
      while (a < d && ++idx[a] == grid_density) idx[a++] = 0;
      if (a == d) break;
    }
    return best;
  }

  // No box: barycentric grid over each simplex (covers the polytope exactly).
  const int d = map.dimension();
  for (int s = 0; s < map.num_simplices(); ++s) {
    const auto& sp = map.simplex(s);
    std::vector<int> idx(d, 0);
    while (true) {
      Vector local(d);
      double sum = 0;
      for (int a = 0; a < d; ++a) {
        local[a] = idx[a] / double(grid_density - 1);
        sum += local[a];
      }
      if (sum <= 1.0 + 1e-12) {
        Vector p = map.vertex_point(sp.vertex_indices[0]) + sp.T * local;
        consider(p);
      }
      int a = 0;
      while (a < d && ++idx[a] == grid_density) idx[a++] = 0;
      if (a == d) break;
    }
  }
  return best;
}

}  // namespace polyobs
