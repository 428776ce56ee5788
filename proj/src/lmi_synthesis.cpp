#include "polyobs/lmi_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polyobs/errors.hpp"

namespace polyobs {

const char* to_string(Variant v) { return v == Variant::Thm1 ? "thm1" : "thm2"; }

SynthesisWeights SynthesisWeights::normalized() const {
  if (c_v < 0 || c_w < 0 || c_psi < 0) throw ModelError("weights must be nonnegative");
  const double s = c_v + c_w + c_psi;
  if (!(s > 0)) throw ModelError("at least one weight must be positive");
  return {c_v / s, c_w / s, c_psi / s};
}

VariableLayout::VariableLayout(int N, const Dims& dims, Variant variant, bool diagonal_multiplier)
    : N_(N), n_x_(dims.n_x), n_y_(dims.n_y), n_phi_(dims.n_phi), variant_(variant) {
  tau_dim_ = dims.n_phi == 0 ? 0 : (diagonal_multiplier ? dims.n_phi : 1);
  const int p_sz = n_x_ * (n_x_ + 1) / 2;
  const int x_count = variant_ == Variant::Thm1 ? N_ : N_ * N_;
  p_start_ = 0;
  x_start_ = p_start_ + N_ * p_sz;
  y_start_ = x_start_ + x_count * n_x_ * n_x_;
  z_start_ = y_start_ + N_ * N_ * n_x_ * n_y_;
  tau_start_ = z_start_ + N_ * N_ * n_phi_ * n_y_;
  kappa_start_ = tau_start_ + N_ * N_ * tau_dim_;
  total_ = kappa_start_ + 3;
}

int VariableLayout::num_p_vars() const { return N_ * n_x_ * (n_x_ + 1) / 2; }
int VariableLayout::num_x_vars() const {
  return (variant_ == Variant::Thm1 ? N_ : N_ * N_) * n_x_ * n_x_;
}
int VariableLayout::num_y_vars() const { return N_ * N_ * n_x_ * n_y_; }
int VariableLayout::num_z_vars() const { return N_ * N_ * n_phi_ * n_y_; }
int VariableLayout::num_tau_vars() const { return N_ * N_ * tau_dim_; }

int VariableLayout::p_index(int i, int r, int c) const {
  // packed upper triangle, row-major: (r, c) with r <= c
  const int off = r * n_x_ - r * (r - 1) / 2 + (c - r);
  return p_start_ + i * (n_x_ * (n_x_ + 1) / 2) + off;
}

int VariableLayout::x_index(int i, int r, int c) const {
  return x_start_ + (i * n_x_ + r) * n_x_ + c;
}

int VariableLayout::x_index(int i, int j, int r, int c) const {
  return x_start_ + ((i * N_ + j) * n_x_ + r) * n_x_ + c;
}

int VariableLayout::y_index(int i, int j, int r, int c) const {
  return y_start_ + ((i * N_ + j) * n_x_ + r) * n_y_ + c;
}

int VariableLayout::z_index(int i, int j, int r, int c) const {
  return z_start_ + ((i * N_ + j) * n_phi_ + r) * n_y_ + c;
}

int VariableLayout::tau_index(int i, int j, int t) const {
  return tau_start_ + (i * N_ + j) * tau_dim_ + t;
}

Matrix VariableLayout::unpack_P(const Vector& z, int i) const {
  Matrix P(n_x_, n_x_);
  for (int r = 0; r < n_x_; ++r)
    for (int c = r; c < n_x_; ++c) P(r, c) = P(c, r) = z[p_index(i, r, c)];
  return P;
}

Matrix VariableLayout::unpack_X(const Vector& z, int i) const {
  Matrix X(n_x_, n_x_);
  for (int r = 0; r < n_x_; ++r)
    for (int c = 0; c < n_x_; ++c) X(r, c) = z[x_index(i, r, c)];
  return X;
}

Matrix VariableLayout::unpack_X(const Vector& z, int i, int j) const {
  Matrix X(n_x_, n_x_);
  for (int r = 0; r < n_x_; ++r)
    for (int c = 0; c < n_x_; ++c) X(r, c) = z[x_index(i, j, r, c)];
  return X;
}

Matrix VariableLayout::unpack_Y(const Vector& z, int i, int j) const {
  Matrix Y(n_x_, n_y_);
  for (int r = 0; r < n_x_; ++r)
    for (int c = 0; c < n_y_; ++c) Y(r, c) = z[y_index(i, j, r, c)];
  return Y;
}

Matrix VariableLayout::unpack_Z(const Vector& z, int i, int j) const {
  Matrix Z(n_phi_, n_y_);
  for (int r = 0; r < n_phi_; ++r)
    for (int c = 0; c < n_y_; ++c) Z(r, c) = z[z_index(i, j, r, c)];
  return Z;
}

Vector VariableLayout::unpack_tau(const Vector& z, int i, int j) const {
  Vector t(tau_dim_);
  for (int k = 0; k < tau_dim_; ++k) t[k] = z[tau_index(i, j, k)];
  return t;
}

const Matrix& SynthesisCertificate::Xmat(int i, int j) const {
  if (variant == Variant::Thm1) return X.at(i);
  return X.at(i * N() + j);
}

Matrix assemble_lmi_block(const PolytopicDescriptorSystem& sys, int i, const Matrix& E_next,
                          const Matrix& P_i, const Matrix& P_j, const Matrix& X, const Matrix& Y,
                          const Matrix& Z, const Vector& tau, double kappa_v, double kappa_w,
                          double kappa_psi) {
  const auto& d = sys.dims();
  const auto& vi = sys.vertex(i);
  const int r0 = 0;
  const int r1 = d.n_x;
  const int r2 = 2 * d.n_x;
  const int r3 = 2 * d.n_x + d.n_phi;
  const int r4 = r3 + d.n_v;
  const int r5 = r4 + d.n_w;
  const int sz = r5 + d.n_x;

  // tau enters as a diagonal multiplier matrix; the scalar form is the
  // special case with all diagonal entries tied to one variable.
  Matrix T = Matrix::Zero(d.n_phi, d.n_phi);
  if (d.n_phi > 0) {
    if (tau.size() == 1)
      T = tau[0] * Matrix::Identity(d.n_phi, d.n_phi);
    else
      T = Matrix(tau.asDiagonal());
  }

  Matrix M = Matrix::Zero(sz, sz);
  auto put = [&](int r, int c, const Matrix& v) {
    M.block(r, c, v.rows(), v.cols()) = v;
    if (r != c) M.block(c, r, v.cols(), v.rows()) = v.transpose();
  };

  put(r0, r0, he(X * E_next) - P_j);
  put(r0, r1, X * vi.A - Y * sys.C());
  put(r0, r2, -(X * vi.G));
  put(r0, r3, -(X * vi.F));
  put(r0, r4, Y * sys.D());
  put(r0, r5, X);
  put(r1, r1, P_i - Matrix::Identity(d.n_x, d.n_x));
  put(r2, r1, sys.Lambda() * (T * sys.H() - Z * sys.C()));
  put(r2, r2, 2.0 * T);
  put(r2, r4, sys.Lambda() * Z * sys.D());
  put(r3, r3, kappa_v * Matrix::Identity(d.n_v, d.n_v));
  put(r4, r4, kappa_w * Matrix::Identity(d.n_w, d.n_w));
  put(r5, r5, kappa_psi * Matrix::Identity(d.n_x, d.n_x));
  return M;
}

namespace {

// Assembles one variant-agnostic LMI family by probing the affine block
// formula at unit variable values. Keeps assembly and re-substitution checks
// on the exact same formula.
LmiProblem build_family(const PolytopicDescriptorSystem& sys, const SynthesisWeights& weights,
                        const SynthesisOptions& opts, Variant variant) {
  const auto& d = sys.dims();
  const int N = sys.num_vertices();
  const SynthesisWeights w = [&] {
    SynthesisWeights n = weights;
    if (std::abs(n.c_v + n.c_w + n.c_psi - 1.0) > 1e-9)
      throw ModelError("weights must sum to one (normalize first)");
    if (n.c_v < 0 || n.c_w < 0 || n.c_psi < 0) throw ModelError("weights must be nonnegative");
    return n;
  }();
  if (opts.diagonal_multiplier && d.n_phi > 1) {
    if (sys.Lambda().cwiseAbs().maxCoeff() > 0 &&
        (Matrix(sys.Lambda()) - Matrix(sys.Lambda().diagonal().asDiagonal())).cwiseAbs().maxCoeff() > 1e-12)
      throw ModelError("diagonal multiplier relaxation requires a diagonal Lambda");
  }
  if (variant == Variant::Thm2 && !sys.has_constant_E())
    throw NonConstantEError("Thm2 requires E_i identical across vertices (constant descriptor)");

  VariableLayout layout(N, d, variant, opts.diagonal_multiplier);
  LmiProblem out{SdpProblem(layout.total()), layout, {}, 0};
  SdpProblem& sdp = out.sdp;

  Vector c = Vector::Zero(layout.total());
  c[layout.kv_index()] = w.c_v;
  c[layout.kw_index()] = w.c_w;
  c[layout.kpsi_index()] = w.c_psi;
  sdp.set_objective(c);

  // Scratch variable values for probing.
  Matrix Pi = Matrix::Zero(d.n_x, d.n_x), Pj = Matrix::Zero(d.n_x, d.n_x);
  Matrix X = Matrix::Zero(d.n_x, d.n_x), Y = Matrix::Zero(d.n_x, d.n_y);
  Matrix Z = Matrix::Zero(d.n_phi, d.n_y);
  Vector tau = Vector::Zero(layout.tau_dim());
  double kv = 0, kw = 0, kpsi = 0;

  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (opts.constant_parameter && j != i) continue;
      const Matrix& E_next = variant == Variant::Thm1 ? sys.vertex(j).E : sys.vertex(0).E;
      auto assemble = [&] {
        return assemble_lmi_block(sys, i, E_next, Pi, (i == j) ? Pi : Pj, X, Y, Z, tau, kv, kw, kpsi);
      };
      const int b = sdp.add_block(3 * d.n_x + d.n_phi + d.n_v + d.n_w, opts.epsilon);
      out.block_pairs.emplace_back(i, j);
      const Matrix base = assemble();
      sdp.set_constant(b, base);
      auto probe = [&](int var) {
        Matrix coeff = assemble() - base;
        if (coeff.cwiseAbs().maxCoeff() > 0) sdp.add_coeff(b, var, symmetrize(coeff));
      };
      for (int r = 0; r < d.n_x; ++r)
        for (int cc = r; cc < d.n_x; ++cc) {
          Pi(r, cc) = Pi(cc, r) = 1;
          probe(layout.p_index(i, r, cc));
          Pi(r, cc) = Pi(cc, r) = 0;
          if (j != i) {
            Pj(r, cc) = Pj(cc, r) = 1;
            probe(layout.p_index(j, r, cc));
            Pj(r, cc) = Pj(cc, r) = 0;
          }
        }
      for (int r = 0; r < d.n_x; ++r)
        for (int cc = 0; cc < d.n_x; ++cc) {
          X(r, cc) = 1;
          probe(variant == Variant::Thm1 ? layout.x_index(i, r, cc) : layout.x_index(i, j, r, cc));
          X(r, cc) = 0;
        }
      for (int r = 0; r < d.n_x; ++r)
        for (int cc = 0; cc < d.n_y; ++cc) {
          Y(r, cc) = 1;
          probe(layout.y_index(i, j, r, cc));
          Y(r, cc) = 0;
        }
      for (int r = 0; r < d.n_phi; ++r)
        for (int cc = 0; cc < d.n_y; ++cc) {
          Z(r, cc) = 1;
          probe(layout.z_index(i, j, r, cc));
          Z(r, cc) = 0;
        }
      for (int t = 0; t < layout.tau_dim(); ++t) {
        tau[t] = 1;
        probe(layout.tau_index(i, j, t));
        tau[t] = 0;
      }
      kv = 1;
      probe(layout.kv_index());
      kv = 0;
      kw = 1;
      probe(layout.kw_index());
      kw = 0;
      kpsi = 1;
      probe(layout.kpsi_index());
      kpsi = 0;
    }
  }
  out.num_lmi_blocks = sdp.num_blocks();

  // kappa caps: cap - kappa >= 0, one 1x1 block each.
  for (int k : {layout.kv_index(), layout.kw_index(), layout.kpsi_index()}) {
    const int b = sdp.add_block(1, 0.0);
    sdp.set_constant(b, Matrix::Constant(1, 1, opts.kappa_cap));
    sdp.add_coeff(b, k, Matrix::Constant(1, 1, -1.0));
  }
  return out;
}

SynthesisCertificate unpack_certificate(const VariableLayout& layout, const Vector& z, int N,
                                        Variant variant, const SynthesisOptions& opts) {
  SynthesisCertificate cert;
  cert.variant = variant;
  cert.epsilon = opts.epsilon;
  cert.constant_parameter = opts.constant_parameter;
  cert.diagonal_multiplier = opts.diagonal_multiplier;
  for (int i = 0; i < N; ++i) cert.P.push_back(layout.unpack_P(z, i));
  if (variant == Variant::Thm1) {
    for (int i = 0; i < N; ++i) cert.X.push_back(layout.unpack_X(z, i));
  } else {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) cert.X.push_back(layout.unpack_X(z, i, j));
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      cert.Y.push_back(layout.unpack_Y(z, i, j));
      cert.Z.push_back(layout.unpack_Z(z, i, j));
      cert.tau.push_back(layout.unpack_tau(z, i, j));
    }
  cert.kappa_v = z[layout.kv_index()];
  cert.kappa_w = z[layout.kw_index()];
  cert.kappa_psi = z[layout.kpsi_index()];
  return cert;
}

}  // namespace

LmiProblem build_thm1(const PolytopicDescriptorSystem& sys, const SynthesisWeights& weights,
                      const SynthesisOptions& opts) {
  return build_family(sys, weights, opts, Variant::Thm1);
}

LmiProblem build_thm2(const PolytopicDescriptorSystem& sys, const SynthesisWeights& weights,
                      const SynthesisOptions& opts) {
  return build_family(sys, weights, opts, Variant::Thm2);
}

CertificateCheckResult check_certificate(const PolytopicDescriptorSystem& sys,
                                         const SynthesisCertificate& cert) {
  CertificateCheckResult res;
  const int N = cert.N();
  if (N != sys.num_vertices()) throw DimensionError("certificate/system vertex count mismatch");
  const auto& d = sys.dims();
  std::ostringstream fail;

  res.min_block_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (cert.constant_parameter && j != i) continue;
      const Matrix& E_next = cert.variant == Variant::Thm1 ? sys.vertex(j).E : sys.vertex(0).E;
      Matrix M = assemble_lmi_block(sys, i, E_next, cert.P[i], cert.P[j], cert.Xmat(i, j),
                                    cert.Y[i * N + j], cert.Z[i * N + j], cert.tau[i * N + j],
                                    cert.kappa_v, cert.kappa_w, cert.kappa_psi);
      res.min_block_eig = std::min(res.min_block_eig, min_eigenvalue(symmetrize(M)));
    }
  if (res.min_block_eig < cert.epsilon - 1e-7)
    fail << "block re-substitution: min eig " << res.min_block_eig << " < eps - 1e-7; ";

  res.min_P_eig = std::numeric_limits<double>::infinity();
  for (const auto& P : cert.P) res.min_P_eig = std::min(res.min_P_eig, min_eigenvalue(symmetrize(P)));
  if (res.min_P_eig < 1.0 + cert.epsilon / 2)
    fail << "P_i > I violated: min eig " << res.min_P_eig << "; ";

  res.min_X_sigma = std::numeric_limits<double>::infinity();
  for (const auto& X : cert.X) {
    const double smin = min_singular_value(X);
    const double smax = X.cwiseAbs().maxCoeff();
    res.min_X_sigma = std::min(res.min_X_sigma, smin);
    if (smin <= 1e-12 * std::max(1.0, smax)) fail << "X nonsingularity violated; ";
  }

  res.min_tau = std::numeric_limits<double>::infinity();
  if (d.n_phi > 0)
    for (const auto& t : cert.tau) res.min_tau = std::min(res.min_tau, t.minCoeff());
  if (d.n_phi > 0 && !(res.min_tau > 0)) fail << "tau_ij > 0 violated; ";

  if (!(cert.kappa_v > 0) || !(cert.kappa_w > 0) || !(cert.kappa_psi > 0))
    fail << "kappa > 0 violated; ";

  res.kappa_sigma_sq = cert.kappa_psi * cert.sigma_lower * cert.sigma_lower;
  if (!(res.kappa_sigma_sq > 1.0)) fail << "kappa_psi * sigma_lower^2 <= 1; ";

  res.failure = fail.str();
  res.pass = res.failure.empty();
  return res;
}

SynthesisCertificate synthesize(const PolytopicDescriptorSystem& sys, const CoordinateMap& map,
                                Variant variant, const SynthesisWeights& weights,
                                const SynthesisOptions& opts) {
  const SynthesisWeights w = weights.normalized();
  LmiProblem lmi = variant == Variant::Thm1 ? build_thm1(sys, w, opts) : build_thm2(sys, w, opts);
  SdpSolution sol = solve(lmi.sdp, opts.sdp);
  switch (sol.status) {
    case SdpStatus::Optimal:
      break;
    case SdpStatus::Infeasible:
      throw InfeasibleError("synthesis LMIs are infeasible (variant " +
                            std::string(to_string(variant)) + ")");
    case SdpStatus::MaxIter:
      throw Error("SDP solver hit the iteration limit before converging");
    case SdpStatus::NumericalFailure:
      throw Error("SDP solver failed numerically");
  }
  SynthesisCertificate cert =
      unpack_certificate(lmi.layout, sol.z, sys.num_vertices(), variant, opts);
  cert.iterations = sol.iterations;
  cert.objective_value = sol.objective_value;
  cert.sigma_lower = min_singular_value_E(sys, map, opts.sigma_grid).sigma;

  const CertificateCheckResult chk = check_certificate(sys, cert);
  if (!chk.pass)
    throw CertificateError("solver returned Optimal but the certificate fails checks: " +
                           chk.failure);
  return cert;
}

IssBounds iss_bounds(const SynthesisCertificate& cert, double sigma_lower) {
  if (!(sigma_lower > 0)) throw ModelError("sigma_lower must be positive");
  IssBounds b;
  b.sigma_lower = sigma_lower;
  b.a = cert.kappa_psi * sigma_lower * sigma_lower;
  if (!(b.a > 1.0))
    throw CertificateError("certificate inconsistency: kappa_psi * sigma_lower^2 <= 1");
  b.rho = 1.0 - 1.0 / b.a;
  b.a_num = 0.0;
  for (const auto& P : cert.P) b.a_num = std::max(b.a_num, max_eigenvalue(symmetrize(P)));
  b.rho_num = b.a_num > 1.0 ? 1.0 - 1.0 / b.a_num : 0.0;
  b.beta_coeff = std::sqrt(cert.kappa_psi) * sigma_lower;
  b.gamma_v_coeff = std::sqrt(cert.kappa_psi * cert.kappa_v) * sigma_lower;
  b.gamma_w_coeff = std::sqrt(cert.kappa_psi * cert.kappa_w) * sigma_lower;
  b.gamma_psi_coeff = cert.kappa_psi * sigma_lower;
  return b;
}

}  // namespace polyobs
