#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyobs/json_util.hpp"
#include "polyobs/lmi_synthesis.hpp"
#include "polyobs/observer.hpp"

namespace polyobs {

struct CheckReport {
  std::string name;
  bool pass = false;
  // Slack remaining after tolerances; negative means violated. The worst
  // case over all sampled/checked points.
  double worst_margin = 0.0;
  json witness;  // inputs achieving the worst case; always present on fail
  std::string detail;
};

json report_to_json(const CheckReport& r);
json reports_to_json(const std::vector<CheckReport>& rs);
bool all_pass(const std::vector<CheckReport>& rs);

// Per-step error-system diagnostics along a trajectory.
struct ErrorDiagnostics {
  std::vector<Vector> psi;        // model mismatch, k = 0..H-1
  std::vector<Vector> phi_tilde;  // nonlinearity increment, k = 0..H-1
  std::vector<double> V;          // Lyapunov value, k = 0..H (needs certificate)
  std::vector<double> decrease_residual;  // k = 0..H-1
};

// Samples the slope-restriction quadratic form of the named nonlinearity at
// `count` random pairs with entries in [lo, hi]; passes iff the form stays
// below 1e-9 everywhere.
CheckReport check_slope_restriction(const std::string& phi_id, const Matrix& lambda, double lo,
                                    double hi, int count, std::uint64_t seed = 20240901);

// psi_k = -(E(ph_{k+1}) - E(p_{k+1})) x_{k+1} + (A(ph_k) - A(p_k)) x_k
//         + (B(ph_k) - B(p_k)) u_k + (G(ph_k) - G(p_k)) phi(H x_k)
//         + (F(ph_k) - F(p_k)) v_k
std::vector<Vector> model_mismatch_psi(const PolytopicDescriptorSystem& sys,
                                       const CoordinateMap& map, const Trajectory& traj);

// phi_tilde_k = phi((H - K C) e_k + K D w_k + H x_k) - phi(H x_k) with
// K = K(p_hat_{k+1}, p_hat_k).
std::vector<Vector> nonlinearity_increment(const PolytopicDescriptorSystem& sys,
                                           const CoordinateMap& map, const ObserverGains& gains,
                                           const Trajectory& traj);

ErrorDiagnostics error_diagnostics(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                                   const ObserverGains& gains, const SynthesisCertificate& cert,
                                   const Trajectory& traj);

// e_{k+1} recorded by simulate vs. the error system evaluated directly with
// psi_k and phi_tilde_k; passes iff they agree to `tol` at every step.
CheckReport check_error_dynamics_consistency(const PolytopicDescriptorSystem& sys,
                                             const CoordinateMap& map, const ObserverGains& gains,
                                             const Trajectory& traj, double tol = 1e-9);

// V_{k+1} - V_k <= -|e_k|^2 + kv |v_k|^2 + kw |w_k|^2 + kpsi |psi_k|^2 + tol
// with V(e, p_hat) = e' P(p_hat) e.
CheckReport check_lyapunov_decrease(const CoordinateMap& map, const SynthesisCertificate& cert,
                                    const Trajectory& traj, const std::vector<Vector>& psi,
                                    double tol = 1e-8);

// Telescoped decrease bound restated with the directly computed constant
// a_num = max_i lambda_max(P_i):
//   V_k <= rho_num^k V_0 + a_num (kv |v|^2_{inf,k} + kw |w|^2_{inf,k}
//                                 + kpsi |psi|^2_{inf,k}) + tol
CheckReport check_iss_bound(const CoordinateMap& map, const SynthesisCertificate& cert,
                            const IssBounds& bounds, const Trajectory& traj,
                            const std::vector<Vector>& psi, double tol = 1e-6);

// I <= P(p_hat) over sampled points (min eig >= 1 - 1e-9).
CheckReport check_lyapunov_positivity(const CoordinateMap& map, const SynthesisCertificate& cert,
                                      int samples = 1000, std::uint64_t seed = 20240902);

// Proof-step inequality of the synthesis argument, sampled over p:
//   X_i E(p) P^{-1}(p) E'(p) X_i' - (He(X_i E(p)) - P(p)) >= -1e-8 I.
CheckReport check_proof_step_inequality(const PolytopicDescriptorSystem& sys,
                                        const CoordinateMap& map, const SynthesisCertificate& cert,
                                        int samples = 100, std::uint64_t seed = 20240903);

// Sampled S-procedure consistency: random q with q' W q >= 0 must give
// q' V q > 0, with W the slope-restriction constraint form and V the
// certified quadratic form at sampled (p_hat_plus, p_hat).
CheckReport check_s_procedure_samples(const PolytopicDescriptorSystem& sys,
                                      const CoordinateMap& map, const SynthesisCertificate& cert,
                                      const ObserverGains& gains, int count = 1000,
                                      std::uint64_t seed = 20240904);

CheckReport check_partition_of_unity(const CoordinateMap& map, int samples = 1000,
                                     std::uint64_t seed = 20240905);

// coords(vertex_i) must equal the i-th unit vector exactly.
CheckReport check_vertex_unit(const CoordinateMap& map);

// One closed-loop run at a fixed parameter-mismatch magnitude.
struct MismatchRun {
  double mismatch;  // |p_tilde| held during the run
  Trajectory traj;
};

// Empirical falsification check for the mismatch-ISS property: steady-state
// errors must admit a nondecreasing affine envelope in |p_tilde|, states must
// stay inside the K_x ball (throws ModelError when the corollary's
// preconditions break), and a zero-mismatch run must settle to the noise
// floor. Reports the fitted envelope; this is evidence, not a proof.
CheckReport check_parameter_mismatch_iss(const std::vector<MismatchRun>& runs, double K_x,
                                         double K_u, double K_v, double noise_floor = 1e-6);

// Suites used by the CLI. Sample counts follow the defaults above.
std::vector<CheckReport> assumptions_suite(const PolytopicDescriptorSystem& sys,
                                           const CoordinateMap& map);
std::vector<CheckReport> certificate_suite(const PolytopicDescriptorSystem& sys,
                                           const CoordinateMap& map,
                                           const SynthesisCertificate& cert);
std::vector<CheckReport> trajectory_suite(const PolytopicDescriptorSystem& sys,
                                          const CoordinateMap& map,
                                          const SynthesisCertificate& cert,
                                          const Trajectory& traj);

}  // namespace polyobs
