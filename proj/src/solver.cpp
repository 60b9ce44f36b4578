#include "ippmm/solver.hpp"

#include <chrono>
#include <cmath>

namespace ippmm {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::NoConvergence: return "NoConvergence";
    case SolveStatus::IllConditioned: return "IllConditioned";
  }
  return "?";
}

namespace {

double inf_norm(const SpMat& M) {  // max absolute row sum
  Vec rowsum = Vec::Zero(M.rows());
  for (Index k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  return M.rows() == 0 ? 0.0 : rowsum.maxCoeff();
}

double max_abs(const SpMat& M) {
  double v = 0;
  for (Index k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

}  // namespace

double SolverConfig::reg_thr(const StandardQP& qp) const {
  if (!regularized) return 0.0;
  double na = inf_norm(qp.A), nq = inf_norm(qp.Q);
  double denom = std::max(na * na, nq * nq);
  if (denom <= 0) return 1e-10;  // degenerate all-zero data
  return std::max(tol / denom, 1e-10);
}

StartingPoint starting_point_from_tilde(const StandardQP& qp, const Vec& xt,
                                        const Vec& yt, const Vec& zt) {
  StartingPoint sp;
  sp.x = xt;
  sp.y = yt;
  sp.z = Vec::Zero(qp.n);
  const auto& I = qp.nonneg;
  if (I.empty()) return sp;  // x0 = x~, z0 = 0
  for (Index i : I) sp.z[i] = zt[i];

  double min_x = kInf, min_z = kInf;
  for (Index i : I) {
    min_x = std::min(min_x, xt[i]);
    min_z = std::min(min_z, zt[i]);
  }
  double dx = std::max(-1.5 * min_x, 0.0);
  double dz = std::max(-1.5 * min_z, 0.0);
  double num = 0, den_x = 0, den_z = 0;
  for (Index i : I) {
    num += (xt[i] + dx) * (zt[i] + dz);
    den_x += xt[i] + dx;
    den_z += zt[i] + dz;
  }
  double dtx = den_z > 0 ? dx + 0.5 * num / den_z : 1.0;
  double dtz = den_x > 0 ? dz + 0.5 * num / den_x : 1.0;

  // the shifts must leave every component strictly positive; when they do
  // not (possible whenever a denominator fallback fired), push the worst
  // component up to 1, matching the unit-shift fallback scale
  double floor_x = kInf, floor_z = kInf;
  for (Index i : I) {
    floor_x = std::min(floor_x, xt[i] + dtx);
    floor_z = std::min(floor_z, zt[i] + dtz);
  }
  if (!(floor_x > 0)) dtx += 1.0 - floor_x;
  if (!(floor_z > 0)) dtz += 1.0 - floor_z;

  for (Index i : I) {
    sp.x[i] = xt[i] + dtx;
    sp.z[i] = zt[i] + dtz;
  }
  return sp;
}

StartingPoint starting_point(const StandardQP& qp) {
  const double d = 8.0;
  Vec w = pcg_normal(qp.A, d, qp.b).w;
  Vec xt = qp.A.transpose() * w;
  Vec yt = pcg_normal(qp.A, d, Vec(qp.A * Vec(qp.c + qp.Q * xt))).w;
  Vec zt = qp.c - qp.A.transpose() * yt + qp.Q * xt;
  return starting_point_from_tilde(qp, xt, yt, zt);
}

double step_fraction(const Vec& v, const Vec& dv,
                     const std::vector<Index>& nonneg, double tau) {
  double a = 1.0;
  for (Index i : nonneg)
    if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
  return tau * a;
}

CorrectorTarget corrector_target(const Vec& x, const Vec& z, const Vec& dxp,
                                 const Vec& dzp, double alpha_x, double alpha_z,
                                 const std::vector<Index>& nonneg) {
  CorrectorTarget ct;
  ct.d2 = Vec::Zero(x.size());
  double xz = 0;
  for (Index i : nonneg) {
    ct.g_alpha += (x[i] + alpha_x * dxp[i]) * (z[i] + alpha_z * dzp[i]);
    xz += x[i] * z[i];
  }
  if (!nonneg.empty())
    ct.mu_target = (ct.g_alpha / xz) * (ct.g_alpha / xz) * ct.g_alpha /
                   static_cast<double>(nonneg.size());
  for (Index i : nonneg)
    ct.d2[i] = ct.mu_target / x[i] - dxp[i] * dzp[i] / x[i];
  return ct;
}

bool update_penalties(PenaltyState& ps, const Vec& x, const Vec& y,
                      double mu_prev, double mu_next, double res_p_prev,
                      double res_p_next, double res_d_prev, double res_d_next,
                      double reg_floor) {
  // rate of barrier decrease; in pure PMM mode (mu identically 0) use a
  // fixed aggressive rate so the penalties still decay
  double r = mu_prev > 0 ? std::abs(mu_prev - mu_next) / mu_prev : 0.9;
  bool moved_lambda = false, moved_zeta = false;
  if (res_p_next <= 0.95 * res_p_prev) {
    ps.lambda = y;
    ps.delta *= 1.0 - r;
    moved_lambda = true;
  } else {
    ps.delta *= 1.0 - r / 3.0;
  }
  if (res_d_next <= 0.95 * res_d_prev) {
    ps.zeta = x;
    ps.rho *= 1.0 - r;
    moved_zeta = true;
  } else {
    ps.rho *= 1.0 - r / 3.0;
  }
  ps.delta = std::max(ps.delta, reg_floor);
  ps.rho = std::max(ps.rho, reg_floor);
  ps.k_since_lambda = moved_lambda ? 0 : ps.k_since_lambda + 1;
  ps.k_since_zeta = moved_zeta ? 0 : ps.k_since_zeta + 1;
  return moved_lambda || moved_zeta;
}

std::optional<SolveStatus> check_termination(const TerminationInput& t,
                                             const SolverConfig& cfg) {
  if (t.res_d_rel <= cfg.tol && t.res_p_rel <= cfg.tol && t.mu <= cfg.tol)
    return SolveStatus::Optimal;
  // a diverging iterate can only certify infeasibility if its proximal
  // anchor has been stale for a while; each branch gates on the staleness
  // of the estimate it measures distance from
  if (t.res_d_reg_abs <= cfg.tol && t.dist_zeta > cfg.infeas_threshold &&
      t.k_since_zeta >= cfg.pmm_maxit)
    return SolveStatus::Infeasible;
  if (t.res_p_reg_abs <= cfg.tol && t.dist_lambda > cfg.infeas_threshold &&
      t.k_since_lambda >= cfg.pmm_maxit)
    return SolveStatus::Infeasible;
  if (t.iter >= cfg.ip_maxit) return SolveStatus::NoConvergence;
  return std::nullopt;
}

SolveResult solve(const StandardQP& qp, const SolverConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const Index n = qp.n, m = qp.m;
  const auto& I = qp.nonneg;
  const double nI = static_cast<double>(I.size());
  const double b_scale = std::max(qp.b.norm(), 1.0);
  const double c_scale = std::max(qp.c.norm(), 1.0);

  SolveResult res;
  double reg_floor = cfg.reg_thr(qp);

  StartingPoint sp = starting_point(qp);
  Vec x = sp.x, y = sp.y, z = sp.z;

  PenaltyState ps;
  ps.delta = cfg.delta0;
  ps.rho = cfg.rho0;
  ps.lambda = y;
  ps.zeta = x;

  auto mu_of = [&](const Vec& xx, const Vec& zz) {
    if (I.empty()) return 0.0;
    double s = 0;
    for (Index i : I) s += xx[i] * zz[i];
    return s / nI;
  };
  double mu = mu_of(x, z);

  auto finalize = [&](SolveStatus st, int iters) {
    res.status = st;
    res.x = x;
    res.y = y;
    res.z = z;
    res.objective = qp.objective_at(x);
    res.res_primal = (qp.b - qp.A * x).norm() / b_scale;
    res.res_dual = (qp.c + qp.Q * x - qp.A.transpose() * y - z).norm() / c_scale;
    res.mu = mu;
    res.iterations = iters;
    res.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return res;
  };

  const double k_pivot_fixed = cfg.pivot_threshold;
  int consecutive_failures = 0;

  for (int k = 0;; ++k) {
    Vec rp = qp.b - qp.A * x;
    Vec rd = qp.c + qp.Q * x - qp.A.transpose() * y - z;
    const double rp_norm = rp.norm(), rd_norm = rd.norm();
    Vec rp_reg = rp - ps.delta * (y - ps.lambda);
    Vec rd_reg = rd + ps.rho * (x - ps.zeta);

    TerminationInput ti;
    ti.res_p_rel = rp_norm / b_scale;
    ti.res_d_rel = rd_norm / c_scale;
    ti.mu = mu;
    ti.res_p_reg_abs = rp_reg.norm();
    ti.res_d_reg_abs = rd_reg.norm();
    ti.dist_zeta = (x - ps.zeta).norm();
    ti.dist_lambda = (y - ps.lambda).norm();
    ti.k_since_lambda = ps.k_since_lambda;
    ti.k_since_zeta = ps.k_since_zeta;
    ti.iter = k;
    if (auto st = check_termination(ti, cfg)) return finalize(*st, k);

    // factorize, escalating regularization on failure
    bool escalated_this_iter = false;
    KKTFactorization fact;
    while (true) {
      AugmentedSystem sys = assemble(qp, x, z, ps.rho, ps.delta);
      double piv = k_pivot_fixed >= 0
                       ? k_pivot_fixed
                       : (cfg.regularized ? 0.1 * reg_floor
                                          : 1e-12 * max_abs(sys.K));
      fact = factorize(sys, piv, cfg.dense_limit);
      ++res.factorizations;
      if (fact.status == FactorStatus::ok) {
        consecutive_failures = 0;
        if (cfg.regularized &&
            !(fact.inertia == Inertia{m, n, 0}))
          ++res.inertia_violations;
        break;
      }
      ++consecutive_failures;
      ++res.escalations;
      escalated_this_iter = true;
      if (consecutive_failures >= cfg.escalation_limit)
        return finalize(SolveStatus::IllConditioned, k);
      const bool at_floor = ps.delta <= reg_floor || ps.rho <= reg_floor;
      if (cfg.regularized && at_floor) reg_floor *= 10;
      ps.delta = std::max(ps.delta * 10, reg_floor);
      ps.rho = std::max(ps.rho * 10, reg_floor);
      // recompute the regularized residuals used in the rhs below
      rp_reg = rp - ps.delta * (y - ps.lambda);
      rd_reg = rd + ps.rho * (x - ps.zeta);
    }

    // predictor: affine complementarity target, drive each product toward 0
    Vec d1 = Vec::Zero(n);
    for (Index i : I) d1[i] = -z[i];
    Vec rhs(n + m);
    rhs.head(n) = rd_reg - d1;
    rhs.tail(m) = rp_reg;
    Vec du;
    res.max_dir_residual =
        std::max(res.max_dir_residual, fact.solve(rhs, du, cfg.kappa_solve));
    Vec dxp = du.head(n), dyp = du.tail(m);
    Vec dzp = Vec::Zero(n);
    for (Index i : I) dzp[i] = d1[i] - (z[i] / x[i]) * dxp[i];

    double ax = step_fraction(x, dxp, I, cfg.tau);
    double az = step_fraction(z, dzp, I, cfg.tau);

    // corrector
    CorrectorTarget ct = corrector_target(x, z, dxp, dzp, ax, az, I);
    const Vec& d2 = ct.d2;
    rhs.head(n) = -d2;
    rhs.tail(m).setZero();
    Vec dc;
    res.max_dir_residual =
        std::max(res.max_dir_residual, fact.solve(rhs, dc, cfg.kappa_solve));
    Vec dx = dxp + dc.head(n);
    Vec dy = dyp + dc.tail(m);
    Vec dz = dzp;
    for (Index i : I) dz[i] += d2[i] - (z[i] / x[i]) * dc[i];

    ax = step_fraction(x, dx, I, cfg.tau);
    az = step_fraction(z, dz, I, cfg.tau);

    x += ax * dx;
    y += az * dy;
    z += az * dz;

    // the step fraction keeps the orthant in exact arithmetic, but a long
    // stretch of damped steps can underflow a component to zero
    for (Index i : I)
      if (!(x[i] > 0) || !(z[i] > 0))
        return finalize(SolveStatus::NoConvergence, k + 1);

    const double mu_next = mu_of(x, z);
    const double rp_next = (qp.b - qp.A * x).norm();
    const double rd_next =
        (qp.c + qp.Q * x - qp.A.transpose() * y - z).norm();
    bool updated = update_penalties(ps, x, y, mu, mu_next, rp_norm, rp_next,
                                    rd_norm, rd_next, reg_floor);
    mu = mu_next;

    res.log.push_back({k, mu, rp_next / b_scale, rd_next / c_scale, ax, az,
                       ps.delta, ps.rho, updated, escalated_this_iter});
  }
}

OriginalSolution map_back(const SolveResult& r, const VarMap& map,
                          const RowScaling& scaling) {
  OriginalSolution o;
  Vec y_unscaled = scaling.y_to_unscaled(r.y);
  o.x = map.x_to_original(r.x);
  o.y = map.y_to_original(y_unscaled);
  o.z = map.z_to_original(r.z);
  o.objective = map.objective_to_original(r.objective);
  return o;
}

}  // namespace ippmm
