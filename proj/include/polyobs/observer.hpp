#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polyobs/lmi_synthesis.hpp"
#include "polyobs/polytopic_model.hpp"
#include "polyobs/scenario.hpp"

namespace polyobs {

// On-line gain evaluation for a synthesized certificate.
//
// Thm1 gains: L(p_hat_plus, p_hat) = sum_ij xi_i(p_hat) xi_j(p_hat_plus) L_ij
// with L_ij = X_i^{-1} Y_ij cached at construction.
// Thm2 gains: L = sum_i xi_i(p_hat) X_i(p_hat_plus)^{-1} Y_i(p_hat_plus) with
// [X_i Y_i](p_hat_plus) = sum_j xi_j(p_hat_plus) [X_ij Y_ij]; the inverse is
// an on-line linear solve, never formed explicitly.
// Both variants: K = Z(p_hat_plus, p_hat) / tau(p_hat_plus, p_hat).
class ObserverGains {
 public:
  ObserverGains(SynthesisCertificate cert, const CoordinateMap& map);

  const SynthesisCertificate& certificate() const { return cert_; }

  Matrix gain_L(const Vector& p_hat, const Vector& p_hat_plus) const;
  Matrix gain_K(const Vector& p_hat, const Vector& p_hat_plus) const;

  // Same gains from precomputed weight vectors (saves repeated coords()).
  Matrix gain_L_xi(const Vector& xi_hat, const Vector& xi_hat_plus) const;
  Matrix gain_K_xi(const Vector& xi_hat, const Vector& xi_hat_plus) const;

  // Scalar (or diagonal) multiplier value at the given weights.
  Vector tau_xi(const Vector& xi_hat, const Vector& xi_hat_plus) const;

 private:
  SynthesisCertificate cert_;
  const CoordinateMap* map_;
  std::vector<Matrix> L_;  // Thm1 only: N^2 cached gains, row-major
};

// One plant step: solves E(p_plus) x_plus = A(p) x + G(p) phi(H x) + B(p) u + F(p) v.
Vector step_system(const PolytopicDescriptorSystem& sys, const CoordinateMap& map, const Vector& x,
                   const Vector& u, const Vector& v, const Vector& p, const Vector& p_plus,
                   ClampPolicy policy = ClampPolicy::Clamp);

// One observer step: solves
//   E(p_hat_plus) xhat_plus = A(p_hat) xhat - L (C xhat - y) + B(p_hat) u
//                             + G(p_hat) phi(H xhat - K (C xhat - y)).
Vector step_observer(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                     const ObserverGains& gains, const Vector& x_hat, const Vector& u,
                     const Vector& y, const Vector& p_hat, const Vector& p_hat_plus,
                     ClampPolicy policy = ClampPolicy::Clamp);

struct TrajectoryStep {
  Vector x, x_hat, e, y, u, v, w, p, p_hat;
};

// Closed-loop record. steps[k] holds the state at time k and the inputs
// applied at time k; the last entry's inputs drive nothing.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  long horizon = 0;
  std::uint64_t seed = 0;
  std::string prng = kPrngId;
  std::string model_hash, certificate_hash, scenario_hash;
  long clamp_events = 0;
  bool clamp_parameters = true;

  long size() const { return static_cast<long>(steps.size()); }

  // CSV with header k,x1..,xhat1..,e1..,y1..,u1..,v1..,w1..,p1..,phat1..
  void write_csv(std::ostream& os) const;
  std::string csv_string() const;

  json metadata_to_json() const;
  static Trajectory read_csv(std::istream& is, const json& metadata);
};

// Advances plant and observer over the scenario horizon. Deterministic given
// the scenario seed. p_hat_{k+1} comes from the closed-form estimate
// schedule, matching the one-step-ahead information assumption.
Trajectory simulate(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                    const ObserverGains& gains, const Scenario& scenario);

}  // namespace polyobs
