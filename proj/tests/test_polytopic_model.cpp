#include <doctest.h>

#include <cmath>

#include "polyobs/errors.hpp"
#include "polyobs/rng.hpp"
#include "test_helpers.hpp"

using namespace polyobs;
using polyobs::testing::Example1Oracle;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("evaluate at unit weights returns the exact vertex") {
  auto model = polyobs::testing::load_example1();
  const auto& sys = *model.system;
  const int N = sys.num_vertices();
  for (int k = 0; k < N; ++k) {
    Vector xi = Vector::Zero(N);
    xi[k] = 1.0;
    const VertexBundle b = sys.evaluate(xi);
    CHECK((b.E - sys.vertex(k).E).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.A - sys.vertex(k).A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.B - sys.vertex(k).B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.F - sys.vertex(k).F).cwiseAbs().maxCoeff() == 0.0);
    CHECK((b.G - sys.vertex(k).G).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("evaluate at e1 matches the benchmark's first vertex values") {
  auto model = polyobs::testing::load_example1();
  Vector xi = Vector::Zero(4);
  xi[0] = 1.0;
  const VertexBundle b = model.system->evaluate(xi);
  Matrix expect(2, 2);
  expect << 1.02375, 0.00475, 0.0475, 1.0475;
  CHECK((b.E - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("evaluate at a half-half weight gives the elementwise midpoint") {
  auto model = polyobs::testing::load_example1();
  const auto& sys = *model.system;
  Vector xi = Vector::Zero(4);
  xi[0] = xi[1] = 0.5;
  const VertexBundle b = sys.evaluate(xi);
  CHECK((b.E - 0.5 * (sys.vertex(0).E + sys.vertex(1).E)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((b.A - 0.5 * (sys.vertex(0).A + sys.vertex(1).A)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("evaluate rejects malformed weights") {
  auto model = polyobs::testing::load_example1();
  const auto& sys = *model.system;
  CHECK_THROWS_AS(sys.evaluate(Vector::Ones(3)), DimensionError);
  Vector bad = Vector::Zero(4);
  bad[0] = 1.5;
  bad[1] = -0.5;
  CHECK_THROWS_AS(sys.evaluate(bad), ModelError);
  Vector not_one = Vector::Constant(4, 0.2);
  CHECK_THROWS_AS(sys.evaluate(not_one), ModelError);
}

TEST_CASE("coords maps vertices to unit vectors exactly") {
  auto model = polyobs::testing::load_example1();
  const auto& map = model.map;
  for (int i = 0; i < map.num_vertices(); ++i) {
    const Vector xi = map.coords(map.vertex_point(i), ClampPolicy::Reject);
    for (int k = 0; k < map.num_vertices(); ++k)
      CHECK(xi[k] == (k == i ? 1.0 : 0.0));
  }
}

TEST_CASE("coords at the simplex-1 centroid") {
  auto model = polyobs::testing::load_example1();
  const auto& map = model.map;
  const Vector p = (map.vertex_point(0) + map.vertex_point(2) + map.vertex_point(3)) / 3.0;
  const Vector xi = map.coords(p);
  CHECK(xi[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(xi[1] == 0.0);
  CHECK(xi[2] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(xi[3] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("coords is continuous across the shared simplex edge") {
  auto model = polyobs::testing::load_example1();
  const auto& map = model.map;
  UniformRng rng(7);
  for (int t = 0; t < 100; ++t) {
    const double s = rng.uniform01();
    const Vector p = s * map.vertex_point(2) + (1 - s) * map.vertex_point(3);
    const Vector a = map.simplex_coords(0, p);
    const Vector b = map.simplex_coords(1, p);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(a[0]) <= 1e-12);
    CHECK(std::abs(a[1]) <= 1e-12);
    // half-open assignment: boundary points resolve through simplex 1
    CHECK(map.locate_simplex(p) == 0);
  }
}

TEST_CASE("partition_box reproduces the benchmark vertex order") {
  const CoordinateMap map =
      CoordinateMap::partition_box(vec2(9.5e-3, 4.75e-2), vec2(10.5e-3, 5.25e-2));
  CHECK(map.num_vertices() == 4);
  CHECK(map.num_simplices() == 2);
  CHECK(map.vertex_point(1)[0] == 10.5e-3);
  CHECK(map.vertex_point(1)[1] == 5.25e-2);
  CHECK(map.vertex_point(2)[0] == 10.5e-3);
  CHECK(map.vertex_point(2)[1] == 4.75e-2);
}

TEST_CASE("partition_box of the unit square has an identity first transform") {
  const CoordinateMap map = CoordinateMap::partition_box(vec2(0, 0), vec2(1, 1));
  CHECK((map.simplex(0).T - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partition_box rejects empty or degenerate boxes") {
  CHECK_THROWS_AS(CoordinateMap::partition_box(vec2(0, 0), vec2(1, 0)), ModelError);
  CHECK_THROWS_AS(CoordinateMap::partition_box(vec2(2, 0), vec2(1, 1)), ModelError);
}

TEST_CASE("partition of unity holds on a grid and on random samples") {
  const CoordinateMap map = CoordinateMap::partition_box(vec2(-1, 2), vec2(0.5, 7));
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      Vector p = vec2(-1 + 1.5 * a / 9.0, 2 + 5.0 * b / 9.0);
      const Vector xi = map.coords(p);
      CHECK(std::abs(xi.sum() - 1.0) <= 1e-12);
      CHECK(xi.minCoeff() >= -1e-12);
    }
  UniformRng rng(11);
  for (int t = 0; t < 1000; ++t) {
    Vector p = vec2(rng.uniform(-1, 0.5), rng.uniform(2, 7));
    const Vector xi = map.coords(p);
    CHECK(std::abs(xi.sum() - 1.0) <= 1e-12);
    CHECK(xi.minCoeff() >= -1e-12);
  }
}

TEST_CASE("reconstruction through coords returns vertex bundles") {
  auto model = polyobs::testing::load_example1();
  const auto& sys = *model.system;
  const auto& map = model.map;
  for (int i = 0; i < map.num_vertices(); ++i) {
    const VertexBundle b = sys.evaluate(map.coords(map.vertex_point(i)));
    CHECK((b.E - sys.vertex(i).E).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((b.A - sys.vertex(i).A).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("affine consistency with direct substitution on the benchmark") {
  auto model = polyobs::testing::load_example1();
  const auto& sys = *model.system;
  const auto& map = model.map;
  UniformRng rng(13);
  for (int t = 0; t < 1000; ++t) {
    const double p1 = rng.uniform(9.5e-3, 10.5e-3);
    const double p2 = rng.uniform(4.75e-2, 5.25e-2);
    const VertexBundle b = sys.evaluate(map.coords(vec2(p1, p2)));
    CHECK((b.E - Example1Oracle::E(p1, p2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((b.A - Example1Oracle::A(p1, p2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((b.B - Example1Oracle::B(p1, p2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((b.G - Example1Oracle::G(p1, p2)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("clamping policy projects or rejects out-of-box parameters") {
  auto model = polyobs::testing::load_example1();
  const auto& map = model.map;
  const Vector outside = vec2(0.01, 0.11);
  const Vector clamped = map.clamp_to_box(outside);
  CHECK(clamped[1] == 5.25e-2);
  CHECK((map.coords(outside) - map.coords(clamped)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(map.coords(outside, ClampPolicy::Reject), ModelError);
}

TEST_CASE("kuhn triangulation covers a 3-d box") {
  Vector lo(3), hi(3);
  lo << -1, 0, 2;
  hi << 1, 0.5, 3;
  const CoordinateMap map = CoordinateMap::partition_box(lo, hi);
  CHECK(map.num_vertices() == 8);
  CHECK(map.num_simplices() == 6);

  for (int i = 0; i < map.num_vertices(); ++i) {
    const Vector xi = map.coords(map.vertex_point(i), ClampPolicy::Reject);
    for (int k = 0; k < map.num_vertices(); ++k)
      CHECK(xi[k] == (k == i ? 1.0 : 0.0));
  }

  // partition of unity plus affine reconstruction
  Matrix M(2, 3);
  M << 1, -2, 0.5, 0, 3, 1;
  Vector c0 = vec2(0.3, -4);
  UniformRng rng(17);
  for (int t = 0; t < 1000; ++t) {
    Vector p(3);
    for (int a = 0; a < 3; ++a) p[a] = rng.uniform(lo[a], hi[a]);
    const Vector xi = map.coords(p);
    CHECK(std::abs(xi.sum() - 1.0) <= 1e-12);
    CHECK(xi.minCoeff() >= -1e-12);
    Vector rec = Vector::Zero(2);
    for (int i = 0; i < map.num_vertices(); ++i)
      rec += xi[i] * (M * map.vertex_point(i) + c0);
    CHECK((rec - (M * p + c0)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("1-d boxes use plain barycentric weights") {
  const CoordinateMap map =
      CoordinateMap::partition_box(Vector::Zero(1), Vector::Ones(1));
  const Vector xi = map.coords(Vector::Constant(1, 0.25));
  CHECK(xi[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(xi[1] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("min_singular_value_E on simple descriptor families") {
  Dims d;
  d.n_x = 2;
  d.n_u = 0;
  d.n_y = 1;
  d.n_v = 0;
  d.n_w = 0;
  d.n_phi = 0;
  auto bundle = [&](const Matrix& E) {
    VertexBundle v;
    v.E = E;
    v.A = Matrix::Zero(2, 2);
    v.B = Matrix(2, 0);
    v.F = Matrix(2, 0);
    v.G = Matrix(2, 0);
    return v;
  };
  const CoordinateMap map = CoordinateMap::partition_box(vec2(0, 0), vec2(1, 1));
  const Matrix C = Matrix::Zero(1, 2);
  const Matrix D = Matrix(1, 0);

  PolytopicDescriptorSystem ident(d, {bundle(Matrix::Identity(2, 2)), bundle(Matrix::Identity(2, 2)),
                                      bundle(Matrix::Identity(2, 2)), bundle(Matrix::Identity(2, 2))},
                                  Matrix(0, 2), C, D, Matrix(0, 0), "zero");
  CHECK(min_singular_value_E(ident, map, 5).sigma == doctest::Approx(1.0).epsilon(1e-14));

  Matrix diag23 = Matrix::Zero(2, 2);
  diag23(0, 0) = 2;
  diag23(1, 1) = 3;
  PolytopicDescriptorSystem constant(d, {bundle(diag23), bundle(diag23), bundle(diag23), bundle(diag23)},
                                     Matrix(0, 2), C, D, Matrix(0, 0), "zero");
  CHECK(min_singular_value_E(constant, map, 5).sigma == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("min_singular_value_E reproduces the benchmark figure") {
  auto model = polyobs::testing::load_example1();
  const auto res = min_singular_value_E(*model.system, model.map, 50);
  CHECK(res.sigma == doctest::Approx(1.01).epsilon(0.01));
  CHECK(res.argmin.size() == 2);
  CHECK_THROWS_AS(min_singular_value_E(*model.system, model.map, 1), ModelError);
}

TEST_CASE("construction validates Lambda and descriptor nonsingularity") {
  auto model = polyobs::testing::load_example1();
  const auto& sys = *model.system;
  Matrix bad_lambda(1, 1);
  bad_lambda << -2.0;
  CHECK_THROWS_AS(PolytopicDescriptorSystem(sys.dims(), sys.vertices(), sys.H(), sys.C(), sys.D(),
                                            bad_lambda, sys.nonlinearity_id()),
                  ModelError);

  auto verts = sys.vertices();
  verts[0].E = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(PolytopicDescriptorSystem(sys.dims(), verts, sys.H(), sys.C(), sys.D(),
                                            sys.Lambda(), sys.nonlinearity_id()),
                  ModelError);

  CHECK_THROWS_AS(PolytopicDescriptorSystem(sys.dims(), sys.vertices(), sys.H(), sys.C(), sys.D(),
                                            sys.Lambda(), "no_such_phi"),
                  ModelError);
}

TEST_CASE("nonlinearity catalog") {
  CHECK(has_nonlinearity("zero"));
  CHECK(has_nonlinearity("sin_plus_linear"));
  CHECK_FALSE(has_nonlinearity("cubic"));
  CHECK_THROWS_AS(nonlinearity("cubic"), ModelError);
  const Vector z = Vector::Constant(1, 0.7);
  CHECK(nonlinearity("sin_plus_linear")(z)[0] == doctest::Approx(std::sin(0.7) + 0.7));
  CHECK(nonlinearity("zero")(z)[0] == 0.0);
}
