#include "polyobs/scenario.hpp"

#include <cmath>

#include "polyobs/errors.hpp"

namespace polyobs {

namespace {

const double kPi = 3.14159265358979323846;

SignalSpec::Type type_from_string(const std::string& s) {
  if (s == "zero") return SignalSpec::Type::Zero;
  if (s == "constant") return SignalSpec::Type::Constant;
  if (s == "sine") return SignalSpec::Type::Sine;
  if (s == "uniform") return SignalSpec::Type::Uniform;
  if (s == "track_p") return SignalSpec::Type::TrackP;
  throw IoError("scenario: unknown signal type '" + s + "'");
}

std::string type_to_string(SignalSpec::Type t) {
  switch (t) {
    case SignalSpec::Type::Zero: return "zero";
    case SignalSpec::Type::Constant: return "constant";
    case SignalSpec::Type::Sine: return "sine";
    case SignalSpec::Type::Uniform: return "uniform";
    case SignalSpec::Type::TrackP: return "track_p";
  }
  return "?";
}

SignalSpec spec_from_json(const json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("type"))
    throw IoError("scenario: signal '" + name + "' needs a 'type'");
  SignalSpec s;
  s.type = type_from_string(j["type"].get<std::string>());
  switch (s.type) {
    case SignalSpec::Type::Zero:
    case SignalSpec::Type::TrackP:
      break;
    case SignalSpec::Type::Constant:
      s.value = vector_from_json(j.value("value", json::array()), name + ".value");
      break;
    case SignalSpec::Type::Sine:
      s.amplitude = vector_from_json(j.value("amplitude", json::array()), name + ".amplitude");
      if (j.contains("offset"))
        s.offset = vector_from_json(j["offset"], name + ".offset", s.amplitude.size());
      else
        s.offset = Vector::Zero(s.amplitude.size());
      if (j.contains("phase_pi"))
        s.phase_pi = vector_from_json(j["phase_pi"], name + ".phase_pi", s.amplitude.size());
      else
        s.phase_pi = Vector::Zero(s.amplitude.size());
      s.omega_pi = j.value("omega_pi", 0.0);
      break;
    case SignalSpec::Type::Uniform:
      if (!j.contains("lo") || !j.contains("hi"))
        throw IoError("scenario: uniform signal '" + name + "' needs lo/hi");
      s.lo = j["lo"].get<double>();
      s.hi = j["hi"].get<double>();
      if (!(s.lo <= s.hi)) throw IoError("scenario: uniform '" + name + "' needs lo <= hi");
      s.first = j.value("first", 0L);
      s.last = j.value("last", -1L);
      break;
  }
  return s;
}

json spec_to_json(const SignalSpec& s) {
  json j;
  j["type"] = type_to_string(s.type);
  switch (s.type) {
    case SignalSpec::Type::Zero:
    case SignalSpec::Type::TrackP:
      break;
    case SignalSpec::Type::Constant:
      j["value"] = vector_to_json(s.value);
      break;
    case SignalSpec::Type::Sine:
      j["amplitude"] = vector_to_json(s.amplitude);
      j["offset"] = vector_to_json(s.offset);
      j["phase_pi"] = vector_to_json(s.phase_pi);
      j["omega_pi"] = s.omega_pi;
      break;
    case SignalSpec::Type::Uniform:
      j["lo"] = s.lo;
      j["hi"] = s.hi;
      j["first"] = s.first;
      j["last"] = s.last;
      break;
  }
  return j;
}

void check_spec_dim(const SignalSpec& s, int dim, const std::string& name) {
  switch (s.type) {
    case SignalSpec::Type::Constant:
      if (s.value.size() != dim)
        throw ScheduleError("signal '" + name + "': constant value has length " +
                            std::to_string(s.value.size()) + ", expected " + std::to_string(dim));
      break;
    case SignalSpec::Type::Sine:
      if (s.amplitude.size() != dim)
        throw ScheduleError("signal '" + name + "': sine parameters have length " +
                            std::to_string(s.amplitude.size()) + ", expected " + std::to_string(dim));
      break;
    default:
      break;
  }
}

}  // namespace

void Scenario::validate(int n_u, int n_v, int n_w, int n_p) const {
  if (horizon < 0) throw ScheduleError("horizon must be nonnegative");
  check_spec_dim(u, n_u, "u");
  check_spec_dim(v, n_v, "v");
  check_spec_dim(w, n_w, "w");
  check_spec_dim(p, n_p, "p");
  if (p_hat.type != SignalSpec::Type::TrackP) check_spec_dim(p_hat, n_p, "p_hat");
  if (!p.is_deterministic())
    throw ScheduleError("the true-parameter schedule must be closed-form (one-step lookahead)");
  if (!p_hat.is_deterministic())
    throw ScheduleError("the parameter-estimate schedule must be closed-form (one-step lookahead)");
  if (u.type == SignalSpec::Type::TrackP || v.type == SignalSpec::Type::TrackP ||
      w.type == SignalSpec::Type::TrackP || p.type == SignalSpec::Type::TrackP)
    throw ScheduleError("track_p is only meaningful for p_hat");
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw IoError("scenario: expected a JSON object");
  Scenario s;
  if (!j.contains("horizon") || !j["horizon"].is_number_integer())
    throw IoError("scenario: missing integer 'horizon'");
  s.horizon = j["horizon"].get<long>();
  s.seed = j.value("seed", 0ull);
  s.x0 = vector_from_json(j.value("x0", json::array()), "x0");
  s.xhat0 = vector_from_json(j.value("xhat0", json::array()), "xhat0");
  if (!j.contains("signals") || !j["signals"].is_object())
    throw IoError("scenario: missing 'signals'");
  const json& sig = j["signals"];
  auto get = [&](const char* name) {
    if (!sig.contains(name)) return SignalSpec{};  // default zero
    return spec_from_json(sig[name], name);
  };
  s.u = get("u");
  s.v = get("v");
  s.w = get("w");
  s.p = get("p");
  s.p_hat = get("p_hat");
  s.clamp_parameters = j.value("clamp_parameters", true);
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  j["x0"] = vector_to_json(s.x0);
  j["xhat0"] = vector_to_json(s.xhat0);
  j["signals"] = {{"u", spec_to_json(s.u)},
                  {"v", spec_to_json(s.v)},
                  {"w", spec_to_json(s.w)},
                  {"p", spec_to_json(s.p)},
                  {"p_hat", spec_to_json(s.p_hat)}};
  j["clamp_parameters"] = s.clamp_parameters;
  return j;
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_json(load_json_file(path));
}

SignalGenerator::SignalGenerator(const SignalSpec& spec, int dim, std::uint64_t seed,
                                 const std::string& name)
    : spec_(spec), dim_(dim), rng_(mix_seed(seed, fnv1a(name))) {
  if (spec_.type == SignalSpec::Type::TrackP)
    throw ScheduleError("track_p must be resolved to the p schedule before generation");
}

Vector SignalGenerator::eval_deterministic(long k) const {
  switch (spec_.type) {
    case SignalSpec::Type::Zero:
      return Vector::Zero(dim_);
    case SignalSpec::Type::Constant:
      return spec_.value;
    case SignalSpec::Type::Sine: {
      Vector out(dim_);
      for (int c = 0; c < dim_; ++c)
        out[c] = spec_.offset[c] +
                 spec_.amplitude[c] * std::sin(kPi * spec_.omega_pi * double(k) + kPi * spec_.phase_pi[c]);
      return out;
    }
    default:
      throw ScheduleError("signal is not closed-form");
  }
}

Vector SignalGenerator::at(long k) {
  if (spec_.type != SignalSpec::Type::Uniform) return eval_deterministic(k);
  if (k != next_k_)
    throw ScheduleError("noise signals must be sampled sequentially from k = 0");
  ++next_k_;
  Vector out = Vector::Zero(dim_);
  const bool active = k >= spec_.first && (spec_.last < 0 || k <= spec_.last);
  if (active)
    for (int c = 0; c < dim_; ++c) out[c] = rng_.uniform(spec_.lo, spec_.hi);
  return out;
}

}  // namespace polyobs
