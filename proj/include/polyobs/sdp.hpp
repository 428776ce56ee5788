#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polyobs/linalg.hpp"

namespace polyobs {

// One affine symmetric matrix-valued constraint
//   F_b(z) = constant + sum_k z_k coeff[k]  >=  epsilon * I.
// coeff has one entry per decision variable; a 0x0 matrix stands for a zero
// coefficient so untouched variables cost nothing.
struct SdpBlock {
  int size = 0;
  Matrix constant;
  std::vector<Matrix> coeff;
  double epsilon = 0.0;
};

// Linear-objective semidefinite program: minimize objective . z subject to
// every block constraint. Problem data is immutable during solve.
class SdpProblem {
 public:
  SdpProblem() = default;
  explicit SdpProblem(int num_vars) : num_vars_(num_vars), objective_(Vector::Zero(num_vars)) {}

  int num_vars() const { return num_vars_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const Vector& objective() const { return objective_; }
  void set_objective(const Vector& c);
  void set_objective_entry(int k, double v);
  const std::vector<SdpBlock>& blocks() const { return blocks_; }
  const SdpBlock& block(int b) const { return blocks_.at(b); }

  // Returns the index of the new block.
  int add_block(int size, double epsilon = 0.0);
  void set_constant(int b, const Matrix& m);
  // Accumulates m into the coefficient of variable k in block b.
  void add_coeff(int b, int k, const Matrix& m);

  // F_b(z) without the epsilon shift.
  Matrix eval_block(int b, const Vector& z) const;

  // Throws on asymmetric data, bad sizes or non-finite entries.
  void validate() const;

  // SDPA sparse format (initial-form ".dat-s"): upper-triangular entries of
  //   minimize c'x  s.t.  sum_i x_i F_i - F_0 >= 0
  // with F_0 = -(constant - epsilon I) and F_i = coeff[i].
  void dump_sdpa(std::ostream& os) const;

 private:
  int num_vars_ = 0;
  Vector objective_;
  std::vector<SdpBlock> blocks_;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

const char* to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  Vector z;
  double objective_value = 0.0;
  std::vector<double> min_block_eig;  // per block, of F_b(z) (no epsilon shift)
  int iterations = 0;
  double primal_residual = 0.0;  // scaled constraint violation of F(z) - S
  double dual_residual = 0.0;    // scaled multiplier equation violation
  double rel_gap = 0.0;
};

struct SdpOptions {
  double tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
};

// Primal-dual interior-point method with Nesterov-Todd scaling and a
// Mehrotra predictor-corrector, dense factorizations throughout.
// Deterministic: identical inputs give identical iterates.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts = {});

struct ResidualReport {
  std::vector<double> min_block_eig;  // of F_b(z), per block
  double objective_value = 0.0;
  // max over blocks of (epsilon_b - min_block_eig_b); <= 0 when feasible.
  double worst_violation = 0.0;
};

ResidualReport check_solution(const SdpProblem& problem, const Vector& z);

}  // namespace polyobs
