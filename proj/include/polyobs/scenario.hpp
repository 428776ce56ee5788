#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "polyobs/json_util.hpp"
#include "polyobs/linalg.hpp"
#include "polyobs/rng.hpp"

namespace polyobs {

// Closed-form or seeded-noise signal schedule. Types:
//   zero                       all channels zero
//   constant {value}
//   sine     {offset, amplitude, omega_pi, phase_pi}
//              channel c: offset[c] + amplitude[c] * sin(pi*omega_pi*k + pi*phase_pi[c])
//   uniform  {lo, hi, first, last}  iid uniform per channel for k in [first, last], else zero
//   track_p                    (p_hat only) copies the true-parameter schedule
struct SignalSpec {
  enum class Type { Zero, Constant, Sine, Uniform, TrackP };
  Type type = Type::Zero;
  Vector value;       // constant
  Vector offset;      // sine
  Vector amplitude;   // sine
  Vector phase_pi;    // sine
  double omega_pi = 0.0;
  double lo = 0.0, hi = 0.0;  // uniform
  long first = 0;
  long last = -1;  // -1 = no noise window end

  bool is_deterministic() const { return type != Type::Uniform; }
};

struct Scenario {
  long horizon = 0;
  std::uint64_t seed = 0;
  Vector x0, xhat0;
  SignalSpec u, v, w, p, p_hat;
  bool clamp_parameters = true;

  void validate(int n_u, int n_v, int n_w, int n_p) const;
};

Scenario scenario_from_json(const json& j);
json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

// Evaluates one signal over k = 0, 1, 2, ... Noise signals draw from their
// own sub-seeded stream, one draw set per step in order, so trajectories are
// reproducible byte for byte.
class SignalGenerator {
 public:
  // name tags the noise sub-stream ("u", "v", "w", ...).
  SignalGenerator(const SignalSpec& spec, int dim, std::uint64_t seed, const std::string& name);

  // Must be called with strictly increasing k for noise signals.
  Vector at(long k);

  // Closed-form evaluation, valid for deterministic specs at any k.
  Vector eval_deterministic(long k) const;

  int dim() const { return dim_; }

 private:
  SignalSpec spec_;
  int dim_;
  UniformRng rng_;
  long next_k_ = 0;
};

}  // namespace polyobs
