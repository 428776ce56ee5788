#include <doctest.h>

#include <cmath>

#include "polyobs/discretizer.hpp"
#include "polyobs/errors.hpp"
#include "test_helpers.hpp"

using namespace polyobs;
using polyobs::testing::Example1Oracle;

namespace {

ContinuousModel scalar_model(double a) {
  ContinuousModel cm;
  cm.dims = {1, 0, 1, 0, 0, 0};
  ContinuousVertexBundle v;
  v.E = Matrix::Constant(1, 1, 1.0);
  v.A = Matrix::Constant(1, 1, a);
  v.B = Matrix(1, 0);
  v.F = Matrix(1, 0);
  v.G = Matrix(1, 0);
  cm.vertices = {v};
  cm.H = Matrix(0, 1);
  cm.C = Matrix::Constant(1, 1, 1.0);
  cm.D = Matrix(1, 0);
  cm.Lambda = Matrix(0, 0);
  cm.nonlinearity_id = "zero";
  return cm;
}

// The continuous-time family underlying the benchmark, parameterized by the
// rate gamma: Ec = I, Ac = [-g/2, 4-g/2; -g, -g], Bc = Fc = [1;1], Gc = [g/2; g].
ContinuousModel benchmark_ct() {
  ContinuousModel cm;
  cm.dims = {2, 1, 1, 1, 1, 1};
  for (double g : {9.5, 10.5}) {
    ContinuousVertexBundle v;
    v.E = Matrix::Identity(2, 2);
    v.A = Matrix(2, 2);
    v.A << -g / 2, 4 - g / 2, -g, -g;
    v.B = Matrix::Ones(2, 1);
    v.F = Matrix::Ones(2, 1);
    v.G = Matrix(2, 1);
    v.G << g / 2, g;
    cm.vertices.push_back(v);
  }
  cm.H = Matrix::Ones(1, 2);
  cm.C = Matrix(1, 2);
  cm.C << 1, 0;
  cm.D = Matrix::Ones(1, 1);
  cm.Lambda = Matrix::Constant(1, 1, 2.0);
  cm.nonlinearity_id = "sin_plus_linear";
  return cm;
}

}  // namespace

TEST_CASE("scalar tustin matches the bilinear formula") {
  const double a = -1.7, ts = 0.125, theta = ts / 2;
  const PolytopicDescriptorSystem sys = tustin(scalar_model(a), ts);
  CHECK(sys.vertex(0).E(0, 0) == doctest::Approx(1 - theta * a).epsilon(1e-15));
  CHECK(sys.vertex(0).A(0, 0) == doctest::Approx(1 + theta * a).epsilon(1e-15));
}

TEST_CASE("zero dynamics discretize to a pure hold") {
  const PolytopicDescriptorSystem sys = tustin(scalar_model(0.0), 0.5);
  CHECK(sys.vertex(0).E(0, 0) == 1.0);
  CHECK(sys.vertex(0).A(0, 0) == 1.0);
}

TEST_CASE("input and noise channels scale by the sampling period") {
  ContinuousModel cm = scalar_model(-1.0);
  cm.dims.n_u = 1;
  cm.dims.n_v = 1;
  cm.dims.n_phi = 1;
  cm.vertices[0].B = Matrix::Constant(1, 1, 3.0);
  cm.vertices[0].F = Matrix::Constant(1, 1, -2.0);
  cm.vertices[0].G = Matrix::Constant(1, 1, 5.0);
  cm.H = Matrix::Constant(1, 1, 1.0);
  cm.Lambda = Matrix::Constant(1, 1, 1.0);
  const PolytopicDescriptorSystem sys = tustin(cm, 0.01);
  CHECK(sys.vertex(0).B(0, 0) == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(sys.vertex(0).F(0, 0) == doctest::Approx(-0.02).epsilon(1e-15));
  CHECK(sys.vertex(0).G(0, 0) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("benchmark continuous family reproduces the affine discrete matrices") {
  const double ts = 0.01;
  const PolytopicDescriptorSystem sys = tustin(benchmark_ct(), ts);
  // gamma vertices 9.5 and 10.5 correspond to p = (ts, gamma*ts/2)
  const double p2s[2] = {9.5 * ts / 2, 10.5 * ts / 2};
  for (int i = 0; i < 2; ++i) {
    CHECK((sys.vertex(i).E - Example1Oracle::E(ts, p2s[i])).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((sys.vertex(i).A - Example1Oracle::A(ts, p2s[i])).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((sys.vertex(i).B - Example1Oracle::B(ts, p2s[i])).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((sys.vertex(i).G - Example1Oracle::G(ts, p2s[i])).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("generalized eigenvalue diagnostics") {
  ContinuousVertexBundle v;
  v.E = Matrix::Identity(2, 2);
  v.A = Matrix::Identity(2, 2);
  auto chk = check_generalized_eigs(v, 1.0);
  CHECK_FALSE(chk.ok);
  CHECK(chk.margin == doctest::Approx(0.0));

  v.A = -Matrix::Identity(2, 2);
  chk = check_generalized_eigs(v, 0.5);
  CHECK(chk.ok);
  CHECK(chk.margin == doctest::Approx(1.5).epsilon(1e-14));

  const ContinuousModel cm = benchmark_ct();
  for (const auto& vert : cm.vertices) CHECK(check_generalized_eigs(vert, 0.005).ok);
}

TEST_CASE("tustin rejects bad sampling periods and eigenvalue collisions") {
  CHECK_THROWS_AS(tustin(scalar_model(1.0), 0.0), ModelError);
  CHECK_THROWS_AS(tustin(scalar_model(1.0), -0.1), ModelError);
  // theta = 1 hits the generalized eigenvalue of (A, E) = (1, 1)
  CHECK_THROWS_AS(tustin(scalar_model(1.0), 2.0), ModelError);
}

TEST_CASE("scalar tustin approximates the exponential to third order") {
  for (double a : {-2.0, -0.5, 1.0, 2.0}) {
    auto err = [&](double ts) {
      const double theta = ts / 2;
      return std::abs((1 + theta * a) / (1 - theta * a) - std::exp(a * ts));
    };
    const double C = err(0.1) / std::pow(0.1, 3);
    for (double ts : {1e-2, 1e-3}) {
      CHECK(err(ts) <= 1.5 * C * std::pow(ts, 3));
    }
  }
}

TEST_CASE("tustin is affine vertexwise") {
  const ContinuousModel cm = benchmark_ct();
  const double ts = 0.02;
  const PolytopicDescriptorSystem sys = tustin(cm, ts);

  // convex combination of the CT vertices, then discretize
  const double lam = 0.3;
  ContinuousModel mixed = cm;
  ContinuousVertexBundle mv;
  mv.E = lam * cm.vertices[0].E + (1 - lam) * cm.vertices[1].E;
  mv.A = lam * cm.vertices[0].A + (1 - lam) * cm.vertices[1].A;
  mv.B = lam * cm.vertices[0].B + (1 - lam) * cm.vertices[1].B;
  mv.F = lam * cm.vertices[0].F + (1 - lam) * cm.vertices[1].F;
  mv.G = lam * cm.vertices[0].G + (1 - lam) * cm.vertices[1].G;
  mixed.vertices = {mv};
  const PolytopicDescriptorSystem sys_mixed = tustin(mixed, ts);

  const Matrix E_comb = lam * sys.vertex(0).E + (1 - lam) * sys.vertex(1).E;
  const Matrix A_comb = lam * sys.vertex(0).A + (1 - lam) * sys.vertex(1).A;
  CHECK((sys_mixed.vertex(0).E - E_comb).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((sys_mixed.vertex(0).A - A_comb).cwiseAbs().maxCoeff() <= 1e-15);
}
