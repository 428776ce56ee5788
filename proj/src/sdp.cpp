#include "polyobs/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include "polyobs/errors.hpp"

namespace polyobs {

void SdpProblem::set_objective(const Vector& c) {
  if (c.size() != num_vars_) throw DimensionError("objective length != num_vars");
  objective_ = c;
}

void SdpProblem::set_objective_entry(int k, double v) {
  if (k < 0 || k >= num_vars_) throw DimensionError("objective index out of range");
  objective_[k] = v;
}

int SdpProblem::add_block(int size, double epsilon) {
  if (size < 0) throw DimensionError("block size must be nonnegative");
  if (epsilon < 0.0) throw ModelError("block epsilon must be nonnegative");
  SdpBlock b;
  b.size = size;
  b.constant = Matrix::Zero(size, size);
  b.coeff.assign(num_vars_, Matrix());
  b.epsilon = epsilon;
  blocks_.push_back(std::move(b));
  return static_cast<int>(blocks_.size()) - 1;
}

void SdpProblem::set_constant(int b, const Matrix& m) {
  auto& blk = blocks_.at(b);
  if (m.rows() != blk.size || m.cols() != blk.size) throw DimensionError("constant has wrong shape");
  blk.constant = m;
}

void SdpProblem::add_coeff(int b, int k, const Matrix& m) {
  auto& blk = blocks_.at(b);
  if (k < 0 || k >= num_vars_) throw DimensionError("variable index out of range");
  if (m.rows() != blk.size || m.cols() != blk.size) throw DimensionError("coefficient has wrong shape");
  if (blk.coeff[k].size() == 0)
    blk.coeff[k] = m;
  else
    blk.coeff[k] += m;
}

Matrix SdpProblem::eval_block(int b, const Vector& z) const {
  const auto& blk = blocks_.at(b);
  if (z.size() != num_vars_) throw DimensionError("z length != num_vars");
  Matrix out = blk.constant;
  for (int k = 0; k < num_vars_; ++k) {
    if (blk.coeff[k].size() == 0) continue;
    out += z[k] * blk.coeff[k];
  }
  return out;
}

void SdpProblem::validate() const {
  if (objective_.size() != num_vars_) throw DimensionError("objective length != num_vars");
  if (!objective_.allFinite()) throw ModelError("objective has non-finite entries");
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const std::string at = " in block " + std::to_string(b);
    if (static_cast<int>(blk.coeff.size()) != num_vars_)
      throw DimensionError("coefficient list length != num_vars" + at);
    auto check = [&](const Matrix& m, const char* what) {
      if (m.size() == 0) return;
      if (m.rows() != blk.size || m.cols() != blk.size) throw DimensionError(std::string(what) + " shape" + at);
      if (!m.allFinite()) throw ModelError(std::string(what) + " has non-finite entries" + at);
      if (blk.size > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw ModelError(std::string(what) + " is not symmetric" + at);
    };
    check(blk.constant, "constant");
    for (const auto& m : blk.coeff) check(m, "coefficient");
  }
}

void SdpProblem::dump_sdpa(std::ostream& os) const {
  os << "\"polyobs sdp dump, SDPA sparse format\"\n";
  os << num_vars_ << " = mDIM\n";
  os << blocks_.size() << " = nBLOCK\n";
  for (std::size_t b = 0; b < blocks_.size(); ++b) os << blocks_[b].size << (b + 1 < blocks_.size() ? " " : "");
  os << " = bLOCKsTRUCT\n";
  char buf[64];
  for (int k = 0; k < num_vars_; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", objective_[k]);
    os << buf << (k + 1 < num_vars_ ? " " : "");
  }
  os << "\n";
  auto emit = [&](int mat, int blk, const Matrix& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = i; j < m.cols(); ++j) {
        if (m(i, j) == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
        os << mat << " " << blk << " " << i + 1 << " " << j + 1 << " " << buf << "\n";
      }
  };
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    Matrix f0 = -(blk.constant - blk.epsilon * Matrix::Identity(blk.size, blk.size));
    emit(0, static_cast<int>(b) + 1, f0);
    for (int k = 0; k < num_vars_; ++k)
      if (blk.coeff[k].size() != 0) emit(k + 1, static_cast<int>(b) + 1, blk.coeff[k]);
  }
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

ResidualReport check_solution(const SdpProblem& problem, const Vector& z) {
  if (z.size() != problem.num_vars()) throw DimensionError("z length != num_vars");
  ResidualReport rep;
  rep.objective_value = problem.objective().dot(z);
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < problem.num_blocks(); ++b) {
    const double me = min_eigenvalue(symmetrize(problem.eval_block(b, z)));
    rep.min_block_eig.push_back(me);
    rep.worst_violation = std::max(rep.worst_violation, problem.block(b).epsilon - me);
  }
  if (problem.num_blocks() == 0) rep.worst_violation = 0.0;
  return rep;
}

namespace {

// Internal scaled copy of the problem. Variables appearing in no block are
// eliminated (pinned to zero; with nonzero cost the problem is unbounded).
// Each live variable is rescaled so its largest coefficient norm is one,
// each block is rescaled to unit data norm, and the epsilon shift is folded
// into the constant. All transformations are exact on the returned z.
struct Scaled {
  struct Block {
    int size;
    Matrix C0;               // shifted, block-scaled constant
    std::vector<int> vars;   // condensed indices with nonzero coefficients
    std::vector<Matrix> A;   // scaled coefficients, aligned with vars
  };
  int m = 0;                 // number of live variables
  Vector c;                  // scaled objective over live variables
  double obj_scale = 1.0;
  Vector var_scale;          // z_original[live[k]] = z_scaled[k] / var_scale[k]
  std::vector<int> live;     // original index per condensed variable
  std::vector<Block> blocks;
  bool unbounded_free_var = false;
};

Scaled scale_problem(const SdpProblem& p) {
  Scaled s;
  const int m0 = p.num_vars();

  // Block norms first (so variable norms see comparably scaled data).
  std::vector<double> bscale;
  for (int b = 0; b < p.num_blocks(); ++b) {
    const auto& blk = p.block(b);
    double n = blk.constant.size() ? blk.constant.cwiseAbs().maxCoeff() : 0.0;
    n = std::max(n, blk.epsilon);
    for (const auto& a : blk.coeff)
      if (a.size()) n = std::max(n, a.cwiseAbs().maxCoeff());
    bscale.push_back(n > 0 ? n : 1.0);
  }

  Vector coef_norm = Vector::Zero(m0);
  for (int b = 0; b < p.num_blocks(); ++b) {
    const auto& blk = p.block(b);
    for (int k = 0; k < m0; ++k)
      if (blk.coeff[k].size())
        coef_norm[k] = std::max(coef_norm[k], blk.coeff[k].cwiseAbs().maxCoeff() / bscale[b]);
  }
  std::vector<int> cond(m0, -1);
  for (int k = 0; k < m0; ++k) {
    if (coef_norm[k] > 0.0) {
      cond[k] = static_cast<int>(s.live.size());
      s.live.push_back(k);
    } else if (p.objective()[k] != 0.0) {
      s.unbounded_free_var = true;  // unconstrained variable with cost
    }
  }
  s.m = static_cast<int>(s.live.size());
  s.var_scale = Vector(s.m);
  s.c = Vector(s.m);
  for (int k = 0; k < s.m; ++k) {
    s.var_scale[k] = coef_norm[s.live[k]];
    s.c[k] = p.objective()[s.live[k]] / s.var_scale[k];
  }
  s.obj_scale = s.m > 0 ? std::max(1.0, s.c.cwiseAbs().maxCoeff()) : 1.0;
  s.c /= s.obj_scale;

  for (int b = 0; b < p.num_blocks(); ++b) {
    const auto& blk = p.block(b);
    if (blk.size == 0) continue;
    Scaled::Block sb;
    sb.size = blk.size;
    sb.C0 = symmetrize((blk.constant - blk.epsilon * Matrix::Identity(blk.size, blk.size)) / bscale[b]);
    for (int k = 0; k < m0; ++k) {
      if (blk.coeff[k].size() == 0) continue;
      sb.vars.push_back(cond[k]);
      sb.A.push_back(symmetrize(blk.coeff[k] / (bscale[b] * s.var_scale[cond[k]])));
    }
    s.blocks.push_back(std::move(sb));
  }
  return s;
}

struct BlockState {
  Matrix X, S;            // current iterates
  Matrix R;               // NT scaling factor, W = R R^T
  Vector lambda;          // scaled point (diagonal entries)
  std::vector<Matrix> T;  // R^T A_k R per active variable
  Matrix Rd;              // dual residual C0 + sum z_k A_k - S
  Matrix Dd;              // R^T Rd R
  Matrix dX, dS, dsb, dzb;
  Eigen::LLT<Matrix> lltX, lltS;
};

// Largest alpha >= 0 with X + alpha * dX >= 0, given X = L L^T.
double max_step(const Eigen::LLT<Matrix>& llt, const Matrix& dX) {
  const Matrix& L = llt.matrixL();
  Matrix Y = L.triangularView<Eigen::Lower>().solve(dX);
  Y = L.triangularView<Eigen::Lower>().solve(Y.transpose()).transpose();
  const double lam_min = min_eigenvalue(symmetrize(Y));
  if (lam_min >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lam_min;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts) {
  problem.validate();
  if (!(opts.tol > 0.0)) throw ModelError("solver tolerance must be positive");

  SdpSolution sol;
  sol.z = Vector::Zero(problem.num_vars());

  auto finish = [&](SdpStatus status, const Vector& z, int iters) {
    sol.status = status;
    sol.z = z;
    sol.iterations = iters;
    ResidualReport rep = check_solution(problem, z);
    sol.objective_value = rep.objective_value;
    sol.min_block_eig = rep.min_block_eig;
    // Status invariant: Optimal implies every block clears epsilon - 1e-7.
    if (status == SdpStatus::Optimal && rep.worst_violation > 1e-7)
      sol.status = SdpStatus::NumericalFailure;
    return sol;
  };

  Scaled sp = scale_problem(problem);
  if (sp.unbounded_free_var) return finish(SdpStatus::NumericalFailure, sol.z, 0);

  // No live variables left: a pure feasibility check on the constants.
  if (sp.m == 0) {
    for (const auto& b : sp.blocks)
      if (min_eigenvalue(b.C0) < -1e-12) return finish(SdpStatus::Infeasible, sol.z, 0);
    return finish(SdpStatus::Optimal, sol.z, 0);
  }

  const int m = sp.m;
  const int nb = static_cast<int>(sp.blocks.size());
  int ntot = 0;
  for (const auto& b : sp.blocks) ntot += b.size;

  std::vector<BlockState> st(nb);
  double init = 10.0;
  for (const auto& b : sp.blocks) init = std::max(init, b.C0.cwiseAbs().maxCoeff() * 10.0);
  for (int b = 0; b < nb; ++b) {
    st[b].X = init * Matrix::Identity(sp.blocks[b].size, sp.blocks[b].size);
    st[b].S = st[b].X;
  }
  Vector y = Vector::Zero(m);  // scaled decision variables

  const double cnorm = 1.0 + sp.c.norm();
  double c0norm = 0.0;
  for (const auto& b : sp.blocks) c0norm = std::max(c0norm, b.C0.norm());
  c0norm += 1.0;

  auto unscale = [&](const Vector& ys) {
    Vector z = Vector::Zero(problem.num_vars());
    for (int k = 0; k < m; ++k) z[sp.live[k]] = ys[k] / sp.var_scale[k];
    return z;
  };

  // Stall window for the infeasibility heuristic.
  constexpr int kStallWindow = 20;
  std::vector<double> feas_history;

  Vector rp(m);
  Matrix Msch(m, m);
  Vector h(m);
  int iter = 0;

  for (iter = 1; iter <= opts.max_iter; ++iter) {
    // Residuals and measures.
    double mu = 0.0;
    for (int b = 0; b < nb; ++b) mu += st[b].X.cwiseProduct(st[b].S).sum();
    const double gap = mu;
    mu /= ntot;

    for (int k = 0; k < m; ++k) rp[k] = sp.c[k];
    double dinf_num = 0.0;
    for (int b = 0; b < nb; ++b) {
      auto& B = sp.blocks[b];
      auto& S = st[b];
      S.Rd = B.C0 - S.S;
      for (std::size_t a = 0; a < B.vars.size(); ++a) {
        S.Rd += y[B.vars[a]] * B.A[a];
        rp[B.vars[a]] -= B.A[a].cwiseProduct(S.X).sum();
      }
      dinf_num = std::max(dinf_num, S.Rd.norm());
    }
    const double pinf = rp.norm() / cnorm;
    const double dinf = dinf_num / c0norm;

    double pobj = 0.0;
    for (int b = 0; b < nb; ++b) pobj += sp.blocks[b].C0.cwiseProduct(st[b].X).sum();
    const double dobj = -sp.c.dot(y);
    const double rel_gap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.primal_residual = dinf;  // user-facing: constraint-side violation
    sol.dual_residual = pinf;
    sol.rel_gap = rel_gap;

    if (opts.verbose)
      std::fprintf(stderr, "iter %3d  mu %9.2e  pinf %9.2e  dinf %9.2e  gap %9.2e  dobj %+.9e\n",
                   iter, mu, pinf, dinf, rel_gap, dobj);

    if (pinf <= opts.tol && dinf <= opts.tol && rel_gap <= opts.tol)
      return finish(SdpStatus::Optimal, unscale(y), iter);

    // Infeasibility heuristic: the constraint-side residual stalls above
    // 1e-3 while the iteration makes no progress on it.
    feas_history.push_back(std::max(pinf, dinf));
    if (static_cast<int>(feas_history.size()) > kStallWindow) {
      const double now = feas_history.back();
      const double then = feas_history[feas_history.size() - 1 - kStallWindow];
      if (now > 1e-3 && now > 0.8 * then) return finish(SdpStatus::Infeasible, unscale(y), iter);
    }
    // Divergence of the primal objective along a near-recession direction is
    // the other infeasibility signature.
    if (pobj < -1e10 * (1.0 + std::abs(dobj)) && dinf > 1e-5)
      return finish(SdpStatus::Infeasible, unscale(y), iter);

    // NT scaling per block.
    bool fact_ok = true;
    for (int b = 0; b < nb; ++b) {
      auto& S = st[b];
      S.lltX.compute(S.X);
      S.lltS.compute(S.S);
      if (S.lltX.info() != Eigen::Success || S.lltS.info() != Eigen::Success) {
        fact_ok = false;
        break;
      }
      Matrix Lx = S.lltX.matrixL();
      Matrix Ls = S.lltS.matrixL();
      Eigen::JacobiSVD<Matrix> svd(Ls.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
      S.lambda = svd.singularValues();
      if (S.lambda.minCoeff() <= 0.0) {
        fact_ok = false;
        break;
      }
      Vector isq = S.lambda.cwiseSqrt().cwiseInverse();
      S.R = Lx * svd.matrixV() * isq.asDiagonal();
      auto& B = sp.blocks[b];
      S.T.resize(B.vars.size());
      for (std::size_t a = 0; a < B.vars.size(); ++a)
        S.T[a] = symmetrize(S.R.transpose() * B.A[a] * S.R);
      S.Dd = symmetrize(S.R.transpose() * S.Rd * S.R);
    }
    if (!fact_ok) return finish(SdpStatus::NumericalFailure, unscale(y), iter);

    // Schur complement M_kl = sum_b <T_k, T_l>.
    Msch.setZero();
    for (int b = 0; b < nb; ++b) {
      auto& B = sp.blocks[b];
      auto& S = st[b];
      for (std::size_t a1 = 0; a1 < B.vars.size(); ++a1)
        for (std::size_t a2 = a1; a2 < B.vars.size(); ++a2) {
          const double v = S.T[a1].cwiseProduct(S.T[a2]).sum();
          Msch(B.vars[a1], B.vars[a2]) += v;
          if (a1 != a2) Msch(B.vars[a2], B.vars[a1]) += v;
        }
    }
    Eigen::LLT<Matrix> lltM(Msch);
    if (lltM.info() != Eigen::Success) {
      // Mild ridge; the Schur complement can go numerically semidefinite
      // near the central-path limit.
      Msch.diagonal().array() += 1e-12 * (1.0 + Msch.diagonal().maxCoeff());
      lltM.compute(Msch);
      if (lltM.info() != Eigen::Success) return finish(SdpStatus::NumericalFailure, unscale(y), iter);
    }

    // One direction solve for a given complementarity target K per block.
    auto direction = [&](const std::vector<Matrix>& K) {
      for (int k = 0; k < m; ++k) h[k] = -rp[k];
      for (int b = 0; b < nb; ++b) {
        auto& B = sp.blocks[b];
        auto& S = st[b];
        const Matrix KD = K[b] - S.Dd;
        for (std::size_t a = 0; a < B.vars.size(); ++a)
          h[B.vars[a]] += S.T[a].cwiseProduct(KD).sum();
      }
      Vector dy = lltM.solve(h);
      for (int b = 0; b < nb; ++b) {
        auto& B = sp.blocks[b];
        auto& S = st[b];
        S.dS = S.Rd;
        for (std::size_t a = 0; a < B.vars.size(); ++a) S.dS += dy[B.vars[a]] * B.A[a];
        S.dzb = symmetrize(S.R.transpose() * S.dS * S.R);
        S.dsb = K[b] - S.dzb;
        S.dX = symmetrize(S.R * S.dsb * S.R.transpose());
      }
      return dy;
    };

    // Predictor: target zero complementarity, K = -lambda.
    std::vector<Matrix> K(nb);
    for (int b = 0; b < nb; ++b) K[b] = Matrix(Vector(-st[b].lambda).asDiagonal());
    direction(K);

    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(st[b].lltX, st[b].dX));
      ad = std::min(ad, max_step(st[b].lltS, st[b].dS));
    }
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b)
      mu_aff += (st[b].X + ap * st[b].dX).cwiseProduct(st[b].S + ad * st[b].dS).sum();
    mu_aff /= ntot;
    double sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3);
    sigma = std::max(sigma, 1e-10);

    // Corrector: K = Linv(sigma mu I - lambda^2 - ds_aff o dz_aff).
    std::vector<Matrix> saved_dsb(nb), saved_dzb(nb);
    for (int b = 0; b < nb; ++b) {
      saved_dsb[b] = st[b].dsb;
      saved_dzb[b] = st[b].dzb;
    }
    for (int b = 0; b < nb; ++b) {
      const auto& lam = st[b].lambda;
      const Matrix corr = 0.5 * (saved_dsb[b] * saved_dzb[b] + saved_dzb[b] * saved_dsb[b]);
      Matrix Kb(lam.size(), lam.size());
      for (Eigen::Index i = 0; i < lam.size(); ++i)
        for (Eigen::Index j = 0; j < lam.size(); ++j) {
          double num = -corr(i, j);
          if (i == j) num += sigma * mu - lam[i] * lam[i];
          Kb(i, j) = 2.0 * num / (lam[i] + lam[j]);
        }
      K[b] = symmetrize(Kb);
    }
    Vector dy = direction(K);

    ap = std::numeric_limits<double>::infinity();
    ad = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(st[b].lltX, st[b].dX));
      ad = std::min(ad, max_step(st[b].lltS, st[b].dS));
    }
    const double step_frac = 0.98;
    ap = std::min(1.0, step_frac * ap);
    ad = std::min(1.0, step_frac * ad);
    if (!std::isfinite(ap) || !std::isfinite(ad) || ap <= 0 || ad <= 0)
      return finish(SdpStatus::NumericalFailure, unscale(y), iter);

    for (int b = 0; b < nb; ++b) {
      st[b].X = symmetrize(st[b].X + ap * st[b].dX);
      st[b].S = symmetrize(st[b].S + ad * st[b].dS);
    }
    y += ad * dy;
    if (!y.allFinite()) return finish(SdpStatus::NumericalFailure, unscale(y), iter);
  }

  return finish(SdpStatus::MaxIter, unscale(y), opts.max_iter);
}

}  // namespace polyobs
