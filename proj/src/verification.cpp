#include "polyobs/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyobs/errors.hpp"
#include "polyobs/rng.hpp"

namespace polyobs {

json report_to_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["worst_margin"] = r.worst_margin;
  if (!r.witness.is_null()) j["witness"] = r.witness;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

json reports_to_json(const std::vector<CheckReport>& rs) {
  json j = json::array();
  for (const auto& r : rs) j.push_back(report_to_json(r));
  return j;
}

bool all_pass(const std::vector<CheckReport>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const CheckReport& r) { return r.pass; });
}

namespace {

// Random point inside the map's polytope: uniform in the box when there is
// one, otherwise a random convex combination within a random simplex.
Vector sample_point(const CoordinateMap& map, UniformRng& rng) {
  const int d = map.dimension();
  if (map.num_vertices() == 1) return map.vertex_point(0);
  if (map.has_box()) {
    Vector p(d);
    for (int a = 0; a < d; ++a)
      p[a] = rng.uniform(map.box_lower()[a], map.box_upper()[a]);
    return p;
  }
  const int s = static_cast<int>(rng.uniform(0.0, double(map.num_simplices()))) % map.num_simplices();
  const auto& sp = map.simplex(s);
  // Exponential spacings give uniform barycentric weights.
  Vector w(d + 1);
  for (int i = 0; i <= d; ++i) w[i] = -std::log(1.0 - rng.uniform01());
  w /= w.sum();
  Vector p = w[0] * map.vertex_point(sp.vertex_indices[0]);
  for (int k = 1; k <= d; ++k) p += w[k] * map.vertex_point(sp.vertex_indices[k]);
  return p;
}

Matrix P_of(const SynthesisCertificate& cert, const Vector& xi) {
  Matrix P = Matrix::Zero(cert.P[0].rows(), cert.P[0].cols());
  for (int i = 0; i < cert.N(); ++i) P += xi[i] * cert.P[i];
  return P;
}

}  // namespace

CheckReport check_slope_restriction(const std::string& phi_id, const Matrix& lambda, double lo,
                                    double hi, int count, std::uint64_t seed) {
  if (count < 1) throw ModelError("sample count must be at least 1");
  const auto& phi = nonlinearity(phi_id);
  const int n = static_cast<int>(lambda.rows());
  UniformRng rng(mix_seed(seed, fnv1a(phi_id)));
  CheckReport rep;
  rep.name = "slope_restriction";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double tol = 1e-9;
  for (int s = 0; s < count; ++s) {
    Vector x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.uniform(lo, hi);
      y[i] = rng.uniform(lo, hi);
    }
    const Vector Phi = phi(y) - phi(x);
    // [Phi; y-x]' [2I, -Lambda'; -Lambda, 0] [Phi; y-x] <= 0
    const double form = 2.0 * Phi.squaredNorm() - 2.0 * Phi.dot(lambda * (y - x));
    const double margin = tol - form;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      if (margin < 0) rep.witness = {{"x", vector_to_json(x)}, {"y", vector_to_json(y)}, {"form", form}};
    }
  }
  if (n == 0) rep.worst_margin = tol;
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

std::vector<Vector> model_mismatch_psi(const PolytopicDescriptorSystem& sys,
                                       const CoordinateMap& map, const Trajectory& traj) {
  std::vector<Vector> psi;
  if (traj.steps.size() < 2) return psi;
  const ClampPolicy policy = traj.clamp_parameters ? ClampPolicy::Clamp : ClampPolicy::Reject;
  psi.reserve(traj.steps.size() - 1);
  VertexBundle truth = sys.evaluate(map.coords(traj.steps[0].p, policy));
  VertexBundle est = sys.evaluate(map.coords(traj.steps[0].p_hat, policy));
  for (std::size_t k = 0; k + 1 < traj.steps.size(); ++k) {
    const auto& st = traj.steps[k];
    const auto& next = traj.steps[k + 1];
    VertexBundle truth_next = sys.evaluate(map.coords(next.p, policy));
    VertexBundle est_next = sys.evaluate(map.coords(next.p_hat, policy));
    Vector v = -(est_next.E - truth_next.E) * next.x + (est.A - truth.A) * st.x +
               (est.B - truth.B) * st.u + (est.G - truth.G) * sys.phi(sys.H() * st.x) +
               (est.F - truth.F) * st.v;
    psi.push_back(std::move(v));
    truth = std::move(truth_next);
    est = std::move(est_next);
  }
  return psi;
}

std::vector<Vector> nonlinearity_increment(const PolytopicDescriptorSystem& sys,
                                           const CoordinateMap& map, const ObserverGains& gains,
                                           const Trajectory& traj) {
  std::vector<Vector> out;
  if (traj.steps.size() < 2) return out;
  const ClampPolicy policy = traj.clamp_parameters ? ClampPolicy::Clamp : ClampPolicy::Reject;
  out.reserve(traj.steps.size() - 1);
  for (std::size_t k = 0; k + 1 < traj.steps.size(); ++k) {
    const auto& st = traj.steps[k];
    const Vector xi = map.coords(st.p_hat, policy);
    const Vector xi_plus = map.coords(traj.steps[k + 1].p_hat, policy);
    const Matrix K = gains.gain_K_xi(xi, xi_plus);
    const Vector base = sys.H() * st.x;
    const Vector arg = (sys.H() - K * sys.C()) * st.e + K * sys.D() * st.w + base;
    out.push_back(sys.phi(arg) - sys.phi(base));
  }
  return out;
}

ErrorDiagnostics error_diagnostics(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                                   const ObserverGains& gains, const SynthesisCertificate& cert,
                                   const Trajectory& traj) {
  ErrorDiagnostics d;
  d.psi = model_mismatch_psi(sys, map, traj);
  d.phi_tilde = nonlinearity_increment(sys, map, gains, traj);
  const ClampPolicy policy = traj.clamp_parameters ? ClampPolicy::Clamp : ClampPolicy::Reject;
  d.V.reserve(traj.steps.size());
  for (const auto& st : traj.steps) {
    const Vector xi = map.coords(st.p_hat, policy);
    d.V.push_back(st.e.dot(P_of(cert, xi) * st.e));
  }
  for (std::size_t k = 0; k + 1 < traj.steps.size(); ++k) {
    const auto& st = traj.steps[k];
    const double rhs = -st.e.squaredNorm() + cert.kappa_v * st.v.squaredNorm() +
                       cert.kappa_w * st.w.squaredNorm() + cert.kappa_psi * d.psi[k].squaredNorm();
    d.decrease_residual.push_back(d.V[k + 1] - d.V[k] - rhs);
  }
  return d;
}

CheckReport check_error_dynamics_consistency(const PolytopicDescriptorSystem& sys,
                                             const CoordinateMap& map, const ObserverGains& gains,
                                             const Trajectory& traj, double tol) {
  CheckReport rep;
  rep.name = "error_dynamics_consistency";
  const ClampPolicy policy = traj.clamp_parameters ? ClampPolicy::Clamp : ClampPolicy::Reject;
  const std::vector<Vector> psi = model_mismatch_psi(sys, map, traj);
  const std::vector<Vector> phit = nonlinearity_increment(sys, map, gains, traj);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < traj.steps.size(); ++k) {
    const auto& st = traj.steps[k];
    const Vector xi = map.coords(st.p_hat, policy);
    const Vector xi_plus = map.coords(traj.steps[k + 1].p_hat, policy);
    const VertexBundle est = sys.evaluate(xi);
    const VertexBundle est_next = sys.evaluate(xi_plus);
    const Matrix L = gains.gain_L_xi(xi, xi_plus);
    const Vector rhs = (est.A - L * sys.C()) * st.e + est.G * phit[k] - est.F * st.v +
                       L * sys.D() * st.w + psi[k];
    const Vector e_next = Eigen::PartialPivLU<Matrix>(est_next.E).solve(rhs);
    const double err = (e_next - traj.steps[k + 1].e).cwiseAbs().maxCoeff();
    const double margin = tol - err;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      if (margin < 0)
        rep.witness = {{"k", k}, {"deviation", err}};
    }
  }
  if (traj.steps.size() < 2) rep.worst_margin = tol;
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

CheckReport check_lyapunov_decrease(const CoordinateMap& map, const SynthesisCertificate& cert,
                                    const Trajectory& traj, const std::vector<Vector>& psi,
                                    double tol) {
  if (psi.size() + 1 != traj.steps.size() && !(traj.steps.size() <= 1 && psi.empty()))
    throw DimensionError("psi diagnostics do not match the trajectory");
  CheckReport rep;
  rep.name = "lyapunov_decrease";
  const ClampPolicy policy = traj.clamp_parameters ? ClampPolicy::Clamp : ClampPolicy::Reject;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double V_prev = 0.0;
  long violations = 0;
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const auto& st = traj.steps[k];
    const double V = st.e.dot(P_of(cert, map.coords(st.p_hat, policy)) * st.e);
    if (k > 0) {
      const auto& prev = traj.steps[k - 1];
      // Magnitude-scaled tolerance: 1e4-step sums of O(|x|^2) roundoff.
      const double scale = std::max(1.0, prev.x.squaredNorm() / 1e6);
      const double rhs = -prev.e.squaredNorm() + cert.kappa_v * prev.v.squaredNorm() +
                         cert.kappa_w * prev.w.squaredNorm() +
                         cert.kappa_psi * psi[k - 1].squaredNorm();
      const double margin = rhs + tol * scale - (V - V_prev);
      if (margin < 0) ++violations;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        if (margin < 0)
          rep.witness = {{"k", k - 1}, {"V", V_prev}, {"V_next", V}, {"rhs", rhs}};
      }
    }
    V_prev = V;
  }
  if (traj.steps.size() < 2) rep.worst_margin = tol;
  rep.pass = violations == 0;
  rep.detail = "violations: " + std::to_string(violations);
  return rep;
}

CheckReport check_iss_bound(const CoordinateMap& map, const SynthesisCertificate& cert,
                            const IssBounds& bounds, const Trajectory& traj,
                            const std::vector<Vector>& psi, double tol) {
  CheckReport rep;
  rep.name = "iss_bound";
  const ClampPolicy policy = traj.clamp_parameters ? ClampPolicy::Clamp : ClampPolicy::Reject;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  if (traj.steps.empty()) {
    rep.pass = true;
    rep.worst_margin = tol;
    return rep;
  }
  const double a = bounds.a_num;
  const double rho = bounds.rho_num;
  double V0 = 0.0;
  double vmax = 0.0, wmax = 0.0, psimax = 0.0;
  double rho_k = 1.0;
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const auto& st = traj.steps[k];
    const double V = st.e.dot(P_of(cert, map.coords(st.p_hat, policy)) * st.e);
    if (k == 0) V0 = V;
    vmax = std::max(vmax, st.v.squaredNorm());
    wmax = std::max(wmax, st.w.squaredNorm());
    if (k > 0 && k - 1 < psi.size()) psimax = std::max(psimax, psi[k - 1].squaredNorm());
    const double envelope =
        rho_k * V0 + a * (cert.kappa_v * vmax + cert.kappa_w * wmax + cert.kappa_psi * psimax);
    const double margin = envelope + tol - V;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      if (margin < 0) rep.witness = {{"k", k}, {"V", V}, {"envelope", envelope}};
    }
    rho_k *= rho;
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

CheckReport check_lyapunov_positivity(const CoordinateMap& map, const SynthesisCertificate& cert,
                                      int samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "lyapunov_positivity";
  UniformRng rng(seed);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Vector p = sample_point(map, rng);
    const double me = min_eigenvalue(symmetrize(P_of(cert, map.coords(p))));
    const double margin = me - (1.0 - 1e-9);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      if (margin < 0) rep.witness = {{"p", vector_to_json(p)}, {"min_eig", me}};
    }
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

CheckReport check_proof_step_inequality(const PolytopicDescriptorSystem& sys,
                                        const CoordinateMap& map, const SynthesisCertificate& cert,
                                        int samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "proof_step_inequality";
  UniformRng rng(seed);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const int N = cert.N();
  for (int s = 0; s < samples; ++s) {
    const Vector p = sample_point(map, rng);
    const Vector xi = map.coords(p);
    const Matrix E = sys.evaluate(xi).E;
    const Matrix P = P_of(cert, xi);
    const Matrix Pinv = P.inverse();
    for (int i = 0; i < N; ++i) {
      Matrix Xi;
      if (cert.variant == Variant::Thm1) {
        Xi = cert.X[i];
      } else {
        Xi = Matrix::Zero(P.rows(), P.cols());
        for (int j = 0; j < N; ++j) Xi += xi[j] * cert.X[i * N + j];
      }
      const Matrix XE = Xi * E;
      const Matrix lhs = XE * Pinv * XE.transpose() - (he(XE) - P);
      const double me = min_eigenvalue(symmetrize(lhs));
      const double margin = me + 1e-8;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        if (margin < 0) rep.witness = {{"p", vector_to_json(p)}, {"i", i}, {"min_eig", me}};
      }
    }
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

CheckReport check_s_procedure_samples(const PolytopicDescriptorSystem& sys,
                                      const CoordinateMap& map, const SynthesisCertificate& cert,
                                      const ObserverGains& gains, int count, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "s_procedure_samples";
  UniformRng rng(seed);
  const auto& d = sys.dims();
  const int nq = 2 * d.n_x + d.n_phi + d.n_v + d.n_w;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  int accepted = 0;
  int guard = 0;
  while (accepted < count && guard < 100 * count) {
    ++guard;
    const Vector ph = sample_point(map, rng);
    const Vector php = sample_point(map, rng);
    const Vector xi = map.coords(ph);
    const Vector xi_plus = map.coords(php);
    const VertexBundle at = sys.evaluate(xi);
    const VertexBundle at_plus = sys.evaluate(xi_plus);
    const Matrix L = gains.gain_L_xi(xi, xi_plus);
    const Matrix K = gains.gain_K_xi(xi, xi_plus);

    // W: slope restriction of the increment, in q = (e, phi~, v, w, psi).
    Matrix W = Matrix::Zero(nq, nq);
    const int oe = 0, onl = d.n_x, ov = d.n_x + d.n_phi, ow = ov + d.n_v, ops = ow + d.n_w;
    const Matrix HKC = sys.Lambda() * (sys.H() - K * sys.C());
    const Matrix KD = sys.Lambda() * K * sys.D();
    W.block(onl, oe, d.n_phi, d.n_x) = HKC;
    W.block(oe, onl, d.n_x, d.n_phi) = HKC.transpose();
    W.block(onl, onl, d.n_phi, d.n_phi) = -2.0 * Matrix::Identity(d.n_phi, d.n_phi);
    W.block(ow, onl, d.n_w, d.n_phi) = KD.transpose();
    W.block(onl, ow, d.n_phi, d.n_w) = KD;

    // V: diag(P(ph) - I, 0, kv I, kw I, kpsi I) - B' E^-T P(php) E^-1 B.
    Matrix B(d.n_x, nq);
    B.block(0, oe, d.n_x, d.n_x) = at.A - L * sys.C();
    B.block(0, onl, d.n_x, d.n_phi) = at.G;
    B.block(0, ov, d.n_x, d.n_v) = -at.F;
    B.block(0, ow, d.n_x, d.n_w) = L * sys.D();
    B.block(0, ops, d.n_x, d.n_x) = Matrix::Identity(d.n_x, d.n_x);
    const Matrix Einv = at_plus.E.inverse();
    const Matrix mid = Einv.transpose() * P_of(cert, xi_plus) * Einv;
    Matrix V = -B.transpose() * mid * B;
    V.block(oe, oe, d.n_x, d.n_x) += P_of(cert, xi) - Matrix::Identity(d.n_x, d.n_x);
    V.block(ov, ov, d.n_v, d.n_v) += cert.kappa_v * Matrix::Identity(d.n_v, d.n_v);
    V.block(ow, ow, d.n_w, d.n_w) += cert.kappa_w * Matrix::Identity(d.n_w, d.n_w);
    V.block(ops, ops, d.n_x, d.n_x) += cert.kappa_psi * Matrix::Identity(d.n_x, d.n_x);

    Vector q(nq);
    for (int i = 0; i < nq; ++i) q[i] = rng.uniform(-1.0, 1.0);
    const double qn = q.norm();
    if (qn == 0.0) continue;
    q /= qn;
    if (q.dot(W * q) < 0.0) continue;  // constraint not active; resample
    ++accepted;
    const double val = q.dot(V * q);
    if (val < rep.worst_margin) {
      rep.worst_margin = val;
      if (val <= 0)
        rep.witness = {{"p_hat", vector_to_json(ph)}, {"p_hat_plus", vector_to_json(php)},
                       {"q", vector_to_json(q)}, {"qVq", val}};
    }
  }
  rep.detail = "accepted samples: " + std::to_string(accepted);
  rep.pass = accepted == count && rep.worst_margin > 0.0;
  return rep;
}

CheckReport check_partition_of_unity(const CoordinateMap& map, int samples, std::uint64_t seed) {
  CheckReport rep;
  rep.name = "partition_of_unity";
  UniformRng rng(seed);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Vector p = sample_point(map, rng);
    const Vector xi = map.coords(p, ClampPolicy::Reject);
    const double sum_err = std::abs(xi.sum() - 1.0);
    const double min_xi = xi.minCoeff();
    const double margin = std::min(1e-12 - sum_err, min_xi + 1e-12);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      if (margin < 0)
        rep.witness = {{"p", vector_to_json(p)}, {"sum", xi.sum()}, {"min", min_xi}};
    }
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

CheckReport check_vertex_unit(const CoordinateMap& map) {
  CheckReport rep;
  rep.name = "vertex_unit";
  rep.pass = true;
  rep.worst_margin = 0.0;
  for (int i = 0; i < map.num_vertices(); ++i) {
    const Vector xi = map.coords(map.vertex_point(i), ClampPolicy::Reject);
    Vector unit = Vector::Zero(map.num_vertices());
    unit[i] = 1.0;
    const double err = (xi - unit).cwiseAbs().maxCoeff();
    if (err != 0.0) {
      rep.pass = false;
      rep.worst_margin = std::min(rep.worst_margin, -err);
      rep.witness = {{"vertex", i}, {"xi", vector_to_json(xi)}};
    }
  }
  return rep;
}

CheckReport check_parameter_mismatch_iss(const std::vector<MismatchRun>& runs, double K_x,
                                         double K_u, double K_v, double noise_floor) {
  if (runs.empty()) throw ModelError("mismatch check needs at least one run");
  CheckReport rep;
  rep.name = "parameter_mismatch_iss";

  struct Pt {
    double m, steady;
  };
  std::vector<Pt> pts;
  for (const auto& run : runs) {
    double steady = 0.0;
    const std::size_t n = run.traj.steps.size();
    const std::size_t tail = n - std::min<std::size_t>(n, std::max<std::size_t>(1, n / 4));
    for (std::size_t k = 0; k < n; ++k) {
      const auto& st = run.traj.steps[k];
      if (st.x.norm() > K_x)
        throw ModelError("state left the K_x ball during a mismatch run (corollary precondition)");
      if (st.u.norm() > K_u)
        throw ModelError("input left the K_u ball during a mismatch run (corollary precondition)");
      if (st.v.norm() > K_v)
        throw ModelError("disturbance left the K_v ball during a mismatch run");
      if (k >= tail) steady = std::max(steady, st.e.norm());
    }
    pts.push_back({run.mismatch, steady});
  }
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.m < b.m; });

  // Minimal-area affine envelope s <= alpha + beta m with alpha, beta >= 0:
  // try every support pair plus the flat line through the maximum.
  double best_alpha = 0.0, best_beta = 0.0, best_area = std::numeric_limits<double>::infinity();
  auto try_line = [&](double alpha, double beta) {
    if (alpha < 0 || beta < 0) return;
    double area = 0.0;
    for (const auto& pt : pts) {
      const double g = alpha + beta * pt.m;
      if (g < pt.steady - 1e-12) return;  // not an envelope
      area += g - pt.steady;
    }
    if (area < best_area) {
      best_area = area;
      best_alpha = alpha;
      best_beta = beta;
    }
  };
  double smax = 0.0;
  for (const auto& pt : pts) smax = std::max(smax, pt.steady);
  try_line(smax, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[j].m <= pts[i].m) continue;
      const double beta = (pts[j].steady - pts[i].steady) / (pts[j].m - pts[i].m);
      const double alpha = pts[i].steady - beta * pts[i].m;
      try_line(alpha, beta);
    }

  rep.detail = "envelope: alpha=" + std::to_string(best_alpha) + " beta=" + std::to_string(best_beta);
  json fitted = json::array();
  for (const auto& pt : pts) fitted.push_back({{"mismatch", pt.m}, {"steady_error", pt.steady}});
  rep.witness = {{"points", fitted}, {"alpha", best_alpha}, {"beta", best_beta}};

  // Falsifiable part: the zero-mismatch run must settle to the noise floor.
  rep.pass = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& pt : pts) {
    if (pt.m == 0.0) {
      const double margin = noise_floor - pt.steady;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < 0) rep.pass = false;
    }
  }
  if (rep.worst_margin == std::numeric_limits<double>::infinity()) rep.worst_margin = 0.0;
  return rep;
}

std::vector<CheckReport> assumptions_suite(const PolytopicDescriptorSystem& sys,
                                           const CoordinateMap& map) {
  std::vector<CheckReport> out;
  out.push_back(check_slope_restriction(sys.nonlinearity_id(), sys.Lambda(), -10.0, 10.0, 10000));
  out.push_back(check_partition_of_unity(map));
  out.push_back(check_vertex_unit(map));
  CheckReport sig;
  sig.name = "descriptor_nonsingular";
  try {
    const auto res = min_singular_value_E(sys, map, 50);
    sig.pass = true;
    sig.worst_margin = res.sigma;
    sig.detail = "sigma_lower = " + std::to_string(res.sigma);
  } catch (const Error& ex) {
    sig.pass = false;
    sig.worst_margin = -1.0;
    sig.witness = {{"error", ex.what()}};
  }
  out.push_back(std::move(sig));
  return out;
}

std::vector<CheckReport> certificate_suite(const PolytopicDescriptorSystem& sys,
                                           const CoordinateMap& map,
                                           const SynthesisCertificate& cert) {
  std::vector<CheckReport> out;
  CheckReport resub;
  resub.name = "certificate_resubstitution";
  const CertificateCheckResult res = check_certificate(sys, cert);
  resub.pass = res.pass;
  resub.worst_margin = res.min_block_eig - (cert.epsilon - 1e-7);
  resub.detail = res.pass ? "all invariants hold" : res.failure;
  if (!res.pass)
    resub.witness = {{"min_block_eig", res.min_block_eig}, {"min_P_eig", res.min_P_eig},
                     {"min_X_sigma", res.min_X_sigma}, {"min_tau", res.min_tau},
                     {"kappa_sigma_sq", res.kappa_sigma_sq}};
  out.push_back(std::move(resub));
  out.push_back(check_lyapunov_positivity(map, cert));
  out.push_back(check_proof_step_inequality(sys, map, cert));
  ObserverGains gains(cert, map);
  out.push_back(check_s_procedure_samples(sys, map, cert, gains));
  return out;
}

std::vector<CheckReport> trajectory_suite(const PolytopicDescriptorSystem& sys,
                                          const CoordinateMap& map,
                                          const SynthesisCertificate& cert,
                                          const Trajectory& traj) {
  std::vector<CheckReport> out;
  ObserverGains gains(cert, map);
  const std::vector<Vector> psi = model_mismatch_psi(sys, map, traj);
  out.push_back(check_error_dynamics_consistency(sys, map, gains, traj));
  out.push_back(check_lyapunov_decrease(map, cert, traj, psi, 1e-6));
  const IssBounds bounds = iss_bounds(cert, cert.sigma_lower);
  out.push_back(check_iss_bound(map, cert, bounds, traj, psi));
  return out;
}

}  // namespace polyobs
