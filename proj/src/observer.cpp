#include "polyobs/observer.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "polyobs/errors.hpp"

namespace polyobs {

ObserverGains::ObserverGains(SynthesisCertificate cert, const CoordinateMap& map)
    : cert_(std::move(cert)), map_(&map) {
  const int N = cert_.N();
  if (N != map.num_vertices())
    throw DimensionError("certificate and coordinate map disagree on N");
  if (cert_.variant == Variant::Thm1) {
    L_.reserve(N * N);
    for (int i = 0; i < N; ++i) {
      Eigen::PartialPivLU<Matrix> lu(cert_.X[i]);
      for (int j = 0; j < N; ++j) L_.push_back(lu.solve(cert_.Y[i * N + j]));
    }
  }
}

Matrix ObserverGains::gain_L_xi(const Vector& xi_hat, const Vector& xi_hat_plus) const {
  const int N = cert_.N();
  const int n_x = static_cast<int>(cert_.P[0].rows());
  const int n_y = static_cast<int>(cert_.Y[0].cols());
  Matrix L = Matrix::Zero(n_x, n_y);
  if (cert_.variant == Variant::Thm1) {
    for (int i = 0; i < N; ++i) {
      if (xi_hat[i] == 0.0) continue;
      for (int j = 0; j < N; ++j) {
        if (xi_hat_plus[j] == 0.0) continue;
        L += xi_hat[i] * xi_hat_plus[j] * L_[i * N + j];
      }
    }
    return L;
  }
  // Thm2: per i, solve X_i(p_hat_plus) M_i = Y_i(p_hat_plus).
  for (int i = 0; i < N; ++i) {
    if (xi_hat[i] == 0.0) continue;
    Matrix Xi = Matrix::Zero(n_x, n_x);
    Matrix Yi = Matrix::Zero(n_x, n_y);
    for (int j = 0; j < N; ++j) {
      if (xi_hat_plus[j] == 0.0) continue;
      Xi += xi_hat_plus[j] * cert_.X[i * N + j];
      Yi += xi_hat_plus[j] * cert_.Y[i * N + j];
    }
    if (min_singular_value(Xi) < 1e-12 * std::max(1.0, Xi.cwiseAbs().maxCoeff()))
      throw CertificateError("X_i(p_hat_plus) is singular; certificate is corrupt");
    L += xi_hat[i] * Eigen::PartialPivLU<Matrix>(Xi).solve(Yi);
  }
  return L;
}

Vector ObserverGains::tau_xi(const Vector& xi_hat, const Vector& xi_hat_plus) const {
  const int N = cert_.N();
  if (cert_.tau.empty() || cert_.tau[0].size() == 0) return Vector();
  Vector t = Vector::Zero(cert_.tau[0].size());
  for (int i = 0; i < N; ++i) {
    if (xi_hat[i] == 0.0) continue;
    for (int j = 0; j < N; ++j) {
      if (xi_hat_plus[j] == 0.0) continue;
      t += xi_hat[i] * xi_hat_plus[j] * cert_.tau[i * N + j];
    }
  }
  return t;
}

Matrix ObserverGains::gain_K_xi(const Vector& xi_hat, const Vector& xi_hat_plus) const {
  const int N = cert_.N();
  const int n_phi = static_cast<int>(cert_.Z[0].rows());
  const int n_y = static_cast<int>(cert_.Z[0].cols());
  Matrix Z = Matrix::Zero(n_phi, n_y);
  for (int i = 0; i < N; ++i) {
    if (xi_hat[i] == 0.0) continue;
    for (int j = 0; j < N; ++j) {
      if (xi_hat_plus[j] == 0.0) continue;
      Z += xi_hat[i] * xi_hat_plus[j] * cert_.Z[i * N + j];
    }
  }
  if (n_phi == 0) return Z;
  const Vector t = tau_xi(xi_hat, xi_hat_plus);
  if (!(t.minCoeff() > 0.0))
    throw CertificateError("tau(p_hat_plus, p_hat) <= 0; certificate is corrupt");
  if (t.size() == 1) return Z / t[0];
  // Diagonal multiplier: K = T^{-1} Z rowwise.
  Matrix K = Z;
  for (int r = 0; r < n_phi; ++r) K.row(r) /= t[r];
  return K;
}

Matrix ObserverGains::gain_L(const Vector& p_hat, const Vector& p_hat_plus) const {
  return gain_L_xi(map_->coords(p_hat), map_->coords(p_hat_plus));
}

Matrix ObserverGains::gain_K(const Vector& p_hat, const Vector& p_hat_plus) const {
  return gain_K_xi(map_->coords(p_hat), map_->coords(p_hat_plus));
}

namespace {

Vector solve_descriptor(const Matrix& E, const Vector& rhs) {
  if (min_singular_value(E) < 1e-12 * std::max(1.0, E.cwiseAbs().maxCoeff()))
    throw ModelError("descriptor matrix E(p_plus) is singular");
  return Eigen::PartialPivLU<Matrix>(E).solve(rhs);
}

}  // namespace

Vector step_system(const PolytopicDescriptorSystem& sys, const CoordinateMap& map, const Vector& x,
                   const Vector& u, const Vector& v, const Vector& p, const Vector& p_plus,
                   ClampPolicy policy) {
  const VertexBundle now = sys.evaluate(map.coords(p, policy));
  const VertexBundle next = sys.evaluate(map.coords(p_plus, policy));
  const Vector rhs = now.A * x + now.G * sys.phi(sys.H() * x) + now.B * u + now.F * v;
  return solve_descriptor(next.E, rhs);
}

Vector step_observer(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                     const ObserverGains& gains, const Vector& x_hat, const Vector& u,
                     const Vector& y, const Vector& p_hat, const Vector& p_hat_plus,
                     ClampPolicy policy) {
  const Vector xi = map.coords(p_hat, policy);
  const Vector xi_plus = map.coords(p_hat_plus, policy);
  const VertexBundle now = sys.evaluate(xi);
  const VertexBundle next = sys.evaluate(xi_plus);
  const Vector innovation = sys.C() * x_hat - y;
  const Matrix L = gains.gain_L_xi(xi, xi_plus);
  const Matrix K = gains.gain_K_xi(xi, xi_plus);
  const Vector rhs = now.A * x_hat - L * innovation + now.B * u +
                     now.G * sys.phi(sys.H() * x_hat - K * innovation);
  return solve_descriptor(next.E, rhs);
}

Trajectory simulate(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                    const ObserverGains& gains, const Scenario& scenario) {
  const auto& d = sys.dims();
  const int n_p = map.dimension();
  scenario.validate(d.n_u, d.n_v, d.n_w, n_p);
  if (scenario.x0.size() != d.n_x || scenario.xhat0.size() != d.n_x)
    throw ScheduleError("x0/xhat0 must have length n_x");

  const ClampPolicy policy =
      scenario.clamp_parameters ? ClampPolicy::Clamp : ClampPolicy::Reject;

  SignalGenerator gen_u(scenario.u, d.n_u, scenario.seed, "u");
  SignalGenerator gen_v(scenario.v, d.n_v, scenario.seed, "v");
  SignalGenerator gen_w(scenario.w, d.n_w, scenario.seed, "w");
  SignalGenerator gen_p(scenario.p, n_p, scenario.seed, "p");
  const bool track = scenario.p_hat.type == SignalSpec::Type::TrackP;
  SignalGenerator gen_ph(track ? scenario.p : scenario.p_hat, n_p, scenario.seed, "p_hat");

  Trajectory traj;
  traj.horizon = scenario.horizon;
  traj.seed = scenario.seed;
  traj.clamp_parameters = scenario.clamp_parameters;
  traj.steps.reserve(scenario.horizon + 1);

  Vector x = scenario.x0;
  Vector x_hat = scenario.xhat0;
  for (long k = 0; k <= scenario.horizon; ++k) {
    TrajectoryStep st;
    st.p = gen_p.at(k);
    st.p_hat = gen_ph.at(k);
    if (!map.contains(st.p)) ++traj.clamp_events;
    if (!map.contains(st.p_hat)) ++traj.clamp_events;
    st.u = gen_u.at(k);
    st.v = gen_v.at(k);
    st.w = gen_w.at(k);
    st.x = x;
    st.x_hat = x_hat;
    st.e = x_hat - x;
    st.y = sys.C() * x + sys.D() * st.w;
    traj.steps.push_back(st);
    if (k == scenario.horizon) break;

    const Vector p_plus = gen_p.eval_deterministic(k + 1);
    const Vector ph_plus = gen_ph.eval_deterministic(k + 1);
    try {
      x = step_system(sys, map, st.x, st.u, st.v, st.p, p_plus, policy);
      x_hat = step_observer(sys, map, gains, st.x_hat, st.u, st.y, st.p_hat, ph_plus, policy);
    } catch (const Error& ex) {
      throw ModelError("simulation failed at step " + std::to_string(k) + ": " + ex.what());
    }
  }
  return traj;
}

namespace {

void append_header(std::string& line, const char* base, int n) {
  char buf[32];
  for (int i = 1; i <= n; ++i) {
    std::snprintf(buf, sizeof buf, ",%s%d", base, i);
    line += buf;
  }
}

void append_values(std::string& line, const Vector& v) {
  char buf[40];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g", v[i]);
    line += buf;
  }
}

}  // namespace

void Trajectory::write_csv(std::ostream& os) const { os << csv_string(); }

std::string Trajectory::csv_string() const {
  std::string out;
  const TrajectoryStep* first = steps.empty() ? nullptr : &steps.front();
  std::string header = "k";
  const int n_x = first ? int(first->x.size()) : 0;
  append_header(header, "x", n_x);
  append_header(header, "xhat", n_x);
  append_header(header, "e", n_x);
  append_header(header, "y", first ? int(first->y.size()) : 0);
  append_header(header, "u", first ? int(first->u.size()) : 0);
  append_header(header, "v", first ? int(first->v.size()) : 0);
  append_header(header, "w", first ? int(first->w.size()) : 0);
  append_header(header, "p", first ? int(first->p.size()) : 0);
  append_header(header, "phat", first ? int(first->p.size()) : 0);
  out += header + "\n";
  char buf[32];
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& st = steps[k];
    std::snprintf(buf, sizeof buf, "%zu", k);
    std::string line = buf;
    append_values(line, st.x);
    append_values(line, st.x_hat);
    append_values(line, st.e);
    append_values(line, st.y);
    append_values(line, st.u);
    append_values(line, st.v);
    append_values(line, st.w);
    append_values(line, st.p);
    append_values(line, st.p_hat);
    out += line + "\n";
  }
  return out;
}

json Trajectory::metadata_to_json() const {
  json j;
  j["seed"] = seed;
  j["horizon"] = horizon;
  j["prng"] = prng;
  j["model_hash"] = model_hash;
  j["certificate_hash"] = certificate_hash;
  j["scenario_hash"] = scenario_hash;
  j["clamp_events"] = clamp_events;
  j["clamp_parameters"] = clamp_parameters;
  if (!steps.empty()) {
    j["dims"] = {{"n_x", steps[0].x.size()}, {"n_y", steps[0].y.size()},
                 {"n_u", steps[0].u.size()}, {"n_v", steps[0].v.size()},
                 {"n_w", steps[0].w.size()}, {"n_p", steps[0].p.size()}};
  }
  return j;
}

Trajectory Trajectory::read_csv(std::istream& is, const json& metadata) {
  Trajectory traj;
  traj.seed = metadata.value("seed", 0ull);
  traj.horizon = metadata.value("horizon", 0L);
  traj.prng = metadata.value("prng", std::string(kPrngId));
  traj.model_hash = metadata.value("model_hash", std::string());
  traj.certificate_hash = metadata.value("certificate_hash", std::string());
  traj.scenario_hash = metadata.value("scenario_hash", std::string());
  traj.clamp_events = metadata.value("clamp_events", 0L);
  traj.clamp_parameters = metadata.value("clamp_parameters", true);
  if (!metadata.contains("dims")) throw IoError("trajectory metadata: missing 'dims'");
  const json& dm = metadata["dims"];
  const int n_x = dm.value("n_x", 0), n_y = dm.value("n_y", 0), n_u = dm.value("n_u", 0);
  const int n_v = dm.value("n_v", 0), n_w = dm.value("n_w", 0), n_p = dm.value("n_p", 0);
  const int expect = 1 + 3 * n_x + n_y + n_u + n_v + n_w + 2 * n_p;

  std::string line;
  if (!std::getline(is, line)) throw IoError("trajectory CSV: empty file");
  long k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != expect)
      throw IoError("trajectory CSV: row " + std::to_string(k) + " has " +
                    std::to_string(vals.size()) + " columns, expected " + std::to_string(expect));
    int at = 0;
    if (static_cast<long>(vals[at++]) != k) throw IoError("trajectory CSV: non-contiguous step index");
    auto take = [&](int n) {
      Vector v(n);
      for (int i = 0; i < n; ++i) v[i] = vals[at++];
      return v;
    };
    TrajectoryStep st;
    st.x = take(n_x);
    st.x_hat = take(n_x);
    st.e = take(n_x);
    st.y = take(n_y);
    st.u = take(n_u);
    st.v = take(n_v);
    st.w = take(n_w);
    st.p = take(n_p);
    st.p_hat = take(n_p);
    traj.steps.push_back(std::move(st));
    ++k;
  }
  return traj;
}

}  // namespace polyobs
