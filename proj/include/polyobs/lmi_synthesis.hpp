#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polyobs/polytopic_model.hpp"
#include "polyobs/sdp.hpp"

namespace polyobs {

enum class Variant { Thm1, Thm2 };

const char* to_string(Variant v);

struct SynthesisWeights {
  double c_v = 0.0;
  double c_w = 0.0;
  double c_psi = 0.0;

  // Scales to sum one; throws if any weight is negative or all are zero.
  SynthesisWeights normalized() const;
};

struct SynthesisOptions {
  double epsilon = 1e-6;        // strict-inequality margin: blocks >= eps*I
  double kappa_cap = 1e9;       // upper bound keeping kappas well-scaled
  bool constant_parameter = false;   // assemble only the (i,i) blocks
  bool diagonal_multiplier = false;  // per-channel tau (requires diagonal Lambda)
  int sigma_grid = 50;          // grid density for the sigma_lower scan
  SdpOptions sdp;
};

// Index bookkeeping for the decision vector z. P_i is stored as the packed
// upper triangle; X, Y, Z are dense; tau is one scalar per (i,j) pair, or a
// positive diagonal of length n_phi when the diagonal-multiplier relaxation
// is on.
class VariableLayout {
 public:
  VariableLayout(int N, const Dims& dims, Variant variant, bool diagonal_multiplier);

  int total() const { return total_; }
  int num_vertices() const { return N_; }
  Variant variant() const { return variant_; }
  int tau_dim() const { return tau_dim_; }

  // r <= c required (packed symmetric storage).
  int p_index(int i, int r, int c) const;
  // Thm1: x_index(i, ...); Thm2: x_index(i, j, ...).
  int x_index(int i, int r, int c) const;
  int x_index(int i, int j, int r, int c) const;
  int y_index(int i, int j, int r, int c) const;
  int z_index(int i, int j, int r, int c) const;
  int tau_index(int i, int j, int t) const;
  int kv_index() const { return kappa_start_; }
  int kw_index() const { return kappa_start_ + 1; }
  int kpsi_index() const { return kappa_start_ + 2; }

  int num_p_vars() const;
  int num_x_vars() const;
  int num_y_vars() const;
  int num_z_vars() const;
  int num_tau_vars() const;

  // Decision-vector slices -> matrices.
  Matrix unpack_P(const Vector& z, int i) const;
  Matrix unpack_X(const Vector& z, int i) const;          // Thm1
  Matrix unpack_X(const Vector& z, int i, int j) const;   // Thm2
  Matrix unpack_Y(const Vector& z, int i, int j) const;
  Matrix unpack_Z(const Vector& z, int i, int j) const;
  Vector unpack_tau(const Vector& z, int i, int j) const;

 private:
  int N_, n_x_, n_y_, n_phi_, tau_dim_;
  Variant variant_;
  int p_start_, x_start_, y_start_, z_start_, tau_start_, kappa_start_, total_;
};

// Everything Theorems 1/2 produce.
struct SynthesisCertificate {
  Variant variant = Variant::Thm1;
  std::vector<Matrix> P;    // N symmetric n_x x n_x
  std::vector<Matrix> X;    // N (Thm1) or N^2 row-major [i*N+j] (Thm2)
  std::vector<Matrix> Y;    // N^2 row-major, n_x x n_y
  std::vector<Matrix> Z;    // N^2 row-major, n_phi x n_y
  std::vector<Vector> tau;  // N^2 row-major, length tau_dim
  double kappa_v = 0.0, kappa_w = 0.0, kappa_psi = 0.0;
  double epsilon = 0.0;       // strict margin used at synthesis time
  double sigma_lower = 0.0;   // min_p sigma_min(E(p)) on the synthesis grid
  bool constant_parameter = false;
  bool diagonal_multiplier = false;
  // solver stats
  int iterations = 0;
  double objective_value = 0.0;

  int N() const { return static_cast<int>(P.size()); }
  const Matrix& Xmat(int i, int j) const;  // X_i (Thm1) or X_ij (Thm2)
};

struct LmiProblem {
  SdpProblem sdp;
  VariableLayout layout;
  std::vector<std::pair<int, int>> block_pairs;  // (i,j) per LMI block, in block order
  int num_lmi_blocks = 0;                        // bound blocks follow the LMI blocks
};

// The one true block formula: M_ij (Thm1, with E_j) or N_ij (Thm2, with
// E bar) evaluated at the given variable values. Both the SDP assembly and
// every re-substitution check go through here. i selects the current-step
// vertex matrices A_i, G_i, F_i; the pair index j is carried by E_next, P_j
// and the (i,j)-indexed variables.
Matrix assemble_lmi_block(const PolytopicDescriptorSystem& sys, int i, const Matrix& E_next,
                          const Matrix& P_i, const Matrix& P_j, const Matrix& X, const Matrix& Y,
                          const Matrix& Z, const Vector& tau, double kappa_v, double kappa_w,
                          double kappa_psi);

// Assembles the Theorem 1 family: N^2 blocks (N with constant_parameter) of
// size 2n_x + n_phi + n_v + n_w + n_x, each constrained >= eps*I, plus three
// 1x1 cap blocks for the kappas. Weights must already sum to one.
LmiProblem build_thm1(const PolytopicDescriptorSystem& sys, const SynthesisWeights& weights,
                      const SynthesisOptions& opts = {});

// Theorem 2 family N_ij with per-pair slack X_ij; requires a constant
// E-matrix across vertices (throws NonConstantEError otherwise).
LmiProblem build_thm2(const PolytopicDescriptorSystem& sys, const SynthesisWeights& weights,
                      const SynthesisOptions& opts = {});

// Builds, solves and verifies. Throws InfeasibleError when the SDP is
// infeasible and CertificateError when the solver claims success but the
// certificate fails re-substitution.
SynthesisCertificate synthesize(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                                Variant variant, const SynthesisWeights& weights,
                                const SynthesisOptions& opts = {});

struct CertificateCheckResult {
  bool pass = false;
  double min_block_eig = 0.0;        // over assembled LMI blocks at the certificate
  double min_P_eig = 0.0;            // invariant: >= 1 + eps/2
  double min_X_sigma = 0.0;          // invariant: nonsingular
  double min_tau = 0.0;              // invariant: > 0 (when n_phi > 0)
  double kappa_sigma_sq = 0.0;       // kappa_psi * sigma_lower^2, must exceed 1
  std::string failure;               // empty when pass
};

// Re-substitutes the certificate into every assembled block and checks the
// SynthesisCertificate invariants.
CertificateCheckResult check_certificate(const PolytopicDescriptorSystem& sys,
                                         const SynthesisCertificate& cert);

// ISS constants of Theorem 1. The closed-form gains carry sigma_lower as
// stated there; a_num = max_i lambda_max(P_i) is reported alongside because
// it is the constant the trajectory-level checks actually use.
struct IssBounds {
  double a = 0.0;        // kappa_psi * sigma_lower^2
  double a_num = 0.0;    // max_i lambda_max(P_i)
  double rho = 0.0;      // 1 - 1/a
  double rho_num = 0.0;  // 1 - 1/a_num
  double beta_coeff = 0.0;       // sqrt(kappa_psi) * sigma_lower
  double gamma_v_coeff = 0.0;    // sqrt(kappa_psi kappa_v) * sigma_lower
  double gamma_w_coeff = 0.0;    // sqrt(kappa_psi kappa_w) * sigma_lower
  double gamma_psi_coeff = 0.0;  // kappa_psi * sigma_lower
  double sigma_lower = 0.0;
};

IssBounds iss_bounds(const SynthesisCertificate& cert, double sigma_lower);

}  // namespace polyobs
