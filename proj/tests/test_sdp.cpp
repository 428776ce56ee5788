#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "polyobs/errors.hpp"
#include "polyobs/rng.hpp"
#include "polyobs/sdp.hpp"

using namespace polyobs;

namespace {

Matrix m1(double a) { return Matrix::Constant(1, 1, a); }

Matrix m2(double a, double b, double c) {
  Matrix m(2, 2);
  m << a, b, b, c;
  return m;
}

// minimize t s.t. [t 1; 1 t] >= 0  (optimum t = 1)
SdpProblem t_problem() {
  SdpProblem p(1);
  p.set_objective_entry(0, 1.0);
  const int b = p.add_block(2);
  p.set_constant(b, m2(0, 1, 0));
  p.add_coeff(b, 0, m2(1, 0, 1));
  return p;
}

// Random small SDP with a fat interior: F_0 = I, |coeff entries| <= 1/2,
// box |z_k| <= 2 through 1x1 blocks. Always strictly feasible at z = 0.
SdpProblem random_problem(UniformRng& rng, int m) {
  SdpProblem p(m);
  for (int k = 0; k < m; ++k) p.set_objective_entry(k, rng.uniform(-1, 1));
  for (int blk = 0; blk < 2; ++blk) {
    const int b = p.add_block(2);
    p.set_constant(b, Matrix::Identity(2, 2));
    for (int k = 0; k < m; ++k)
      p.add_coeff(b, k, m2(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)));
  }
  for (int k = 0; k < m; ++k) {
    int b = p.add_block(1);
    p.set_constant(b, m1(2.0));
    p.add_coeff(b, k, m1(-1.0));
    b = p.add_block(1);
    p.set_constant(b, m1(2.0));
    p.add_coeff(b, k, m1(1.0));
  }
  return p;
}

// Grid brute force with local refinement. The feasible set is convex with an
// interior point at the origin, so shrinking boxes around the incumbent
// track the optimum.
double grid_oracle(const SdpProblem& p, int m) {
  Vector center = Vector::Zero(m);
  double half = 2.0;
  const int pts = 13;
  double best_val = std::numeric_limits<double>::infinity();
  Vector best = center;
  auto feasible = [&](const Vector& z) {
    for (int b = 0; b < p.num_blocks(); ++b) {
      const Matrix f = p.eval_block(b, z);
      if (f.rows() == 1) {
        if (f(0, 0) < 0) return false;
      } else {
        const double tr = f(0, 0) + f(1, 1);
        const double det = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
        if (tr / 2 - disc < 0) return false;
      }
    }
    return true;
  };
  for (int level = 0; level < 12; ++level) {
    std::vector<int> idx(m, 0);
    while (true) {
      Vector z(m);
      for (int k = 0; k < m; ++k)
        z[k] = center[k] - half + 2 * half * idx[k] / double(pts - 1);
      const double val = p.objective().dot(z);
      if (val < best_val && feasible(z)) {
        best_val = val;
        best = z;
      }
      int k = 0;
      while (k < m && ++idx[k] == pts) idx[k++] = 0;
      if (k == m) break;
    }
    center = best;
    half = 2.5 * (2 * half / (pts - 1));
  }
  return best_val;
}

}  // namespace

TEST_CASE("scalar lower bound") {
  // minimize x s.t. x - 1 >= 0
  SdpProblem p(1);
  p.set_objective_entry(0, 1.0);
  const int b = p.add_block(1);
  p.set_constant(b, m1(-1.0));
  p.add_coeff(b, 0, m1(1.0));
  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("2x2 determinant condition") {
  const SdpSolution sol = solve(t_problem());
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("eigenvalue interval") {
  // minimize z s.t. [1 z; z 1] >= 0 -> z* = -1
  SdpProblem p(1);
  p.set_objective_entry(0, 1.0);
  const int b = p.add_block(2);
  p.set_constant(b, Matrix::Identity(2, 2));
  p.add_coeff(b, 0, m2(0, 1, 0));
  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.z[0] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("check_solution reports per-block eigenvalues") {
  const SdpProblem p = t_problem();
  const SdpSolution sol = solve(p);
  const ResidualReport at_opt = check_solution(p, sol.z);
  CHECK(at_opt.min_block_eig[0] >= -1e-8);

  const ResidualReport at_zero = check_solution(p, Vector::Zero(1));
  CHECK(at_zero.min_block_eig[0] == doctest::Approx(-1.0).epsilon(1e-12));

  SdpProblem empty(1);
  empty.set_objective_entry(0, 0.0);
  const ResidualReport vac = check_solution(empty, Vector::Zero(1));
  CHECK(vac.worst_violation == 0.0);
  CHECK(vac.min_block_eig.empty());
}

TEST_CASE("agrees with a grid oracle on 50 random small problems") {
  UniformRng rng(20240611);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 3;
    const SdpProblem p = random_problem(rng, m);
    const SdpSolution sol = solve(p);
    REQUIRE(sol.status == SdpStatus::Optimal);
    const double oracle = grid_oracle(p, m);
    CHECK(std::abs(sol.objective_value - oracle) <= 1e-4);
  }
}

TEST_CASE("tightening the margin cannot improve the objective") {
  UniformRng rng(99);
  const SdpProblem p0 = random_problem(rng, 2);
  // rebuild with epsilon on the 2x2 blocks
  SdpProblem p(2);
  p.set_objective(p0.objective());
  for (int b = 0; b < p0.num_blocks(); ++b) {
    const auto& blk = p0.block(b);
    const int nb = p.add_block(blk.size, blk.size == 2 ? 0.05 : 0.0);
    p.set_constant(nb, blk.constant);
    for (int k = 0; k < 2; ++k)
      if (blk.coeff[k].size()) p.add_coeff(nb, k, blk.coeff[k]);
  }
  const SdpSolution loose = solve(p0);
  const SdpSolution tight = solve(p);
  REQUIRE(loose.status == SdpStatus::Optimal);
  REQUIRE(tight.status == SdpStatus::Optimal);
  CHECK(tight.objective_value >= loose.objective_value - 1e-9);
}

TEST_CASE("deterministic: identical inputs give bitwise-identical runs") {
  UniformRng rng(7);
  const SdpProblem p = random_problem(rng, 3);
  const SdpSolution a = solve(p);
  const SdpSolution b = solve(p);
  REQUIRE(a.status == SdpStatus::Optimal);
  CHECK(a.iterations == b.iterations);
  REQUIRE(a.z.size() == b.z.size());
  CHECK(std::memcmp(a.z.data(), b.z.data(), sizeof(double) * a.z.size()) == 0);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("infeasible box is reported as such") {
  // x >= 1 and -x >= 0 cannot hold together
  SdpProblem p(1);
  p.set_objective_entry(0, 1.0);
  int b = p.add_block(1);
  p.set_constant(b, m1(-1.0));
  p.add_coeff(b, 0, m1(1.0));
  b = p.add_block(1);
  p.set_constant(b, m1(0.0));
  p.add_coeff(b, 0, m1(-1.0));
  const SdpSolution sol = solve(p);
  CHECK(sol.status == SdpStatus::Infeasible);
}

TEST_CASE("iteration limit is surfaced") {
  SdpOptions opts;
  opts.max_iter = 1;
  const SdpSolution sol = solve(t_problem(), opts);
  CHECK(sol.status == SdpStatus::MaxIter);
}

TEST_CASE("unconstrained variable with cost is a numerical failure") {
  SdpProblem p(2);
  p.set_objective_entry(0, 1.0);
  p.set_objective_entry(1, 1.0);  // never appears in a block
  const int b = p.add_block(1);
  p.set_constant(b, m1(-1.0));
  p.add_coeff(b, 0, m1(1.0));
  CHECK(solve(p).status == SdpStatus::NumericalFailure);
}

TEST_CASE("epsilon shift is respected") {
  // minimize x s.t. x >= eps as a 1x1 block with constant 0
  SdpProblem p(1);
  p.set_objective_entry(0, 1.0);
  const int b = p.add_block(1, 0.25);
  p.set_constant(b, m1(0.0));
  p.add_coeff(b, 0, m1(1.0));
  const SdpSolution sol = solve(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.z[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(sol.min_block_eig[0] >= 0.25 - 1e-7);
}

TEST_CASE("validate flags asymmetric data") {
  SdpProblem p(1);
  p.set_objective_entry(0, 1.0);
  const int b = p.add_block(2);
  Matrix notsym(2, 2);
  notsym << 0, 1, 2, 0;
  p.set_constant(b, notsym);
  CHECK_THROWS_AS(p.validate(), ModelError);
}

TEST_CASE("sdpa dump has the expected structure") {
  std::ostringstream os;
  t_problem().dump_sdpa(os);
  const std::string s = os.str();
  CHECK(s.find("1 = mDIM") != std::string::npos);
  CHECK(s.find("1 = nBLOCK") != std::string::npos);
  CHECK(s.find("2 = bLOCKsTRUCT") != std::string::npos);
  // F_0 = -constant: the (1,2) entry of the constant is 1, so -1 appears
  CHECK(s.find("0 1 1 2 -1") != std::string::npos);
}
