#pragma once

#include <vector>

#include "ippmm/kkt.hpp"
#include "ippmm/problem.hpp"
#include "ippmm/scaling.hpp"

namespace ippmm {

enum class SolveStatus { Optimal, Infeasible, NoConvergence, IllConditioned };

const char* to_string(SolveStatus s);

struct SolverConfig {
  double tol = 1e-6;
  int ip_maxit = 200;
  int pmm_maxit = 5;        // iterations without estimate update before the
                            // infeasibility tests may fire
  double tau = 0.995;       // fraction-to-the-boundary
  double delta0 = 8.0;
  double rho0 = 8.0;
  double infeas_threshold = 1e10;   // ||x-zeta|| / ||y-lambda|| blow-up level
  int escalation_limit = 5;         // consecutive factorization failures
  double kappa_solve = 1e-8;        // refinement trigger in solve_factored
  Index dense_limit = 500;          // dense LDL' backend cutoff
  bool regularized = true;          // false: delta = rho = 0 throughout

  // min pivot magnitude; < 0 means derive it (0.1*reg_thr when regularized,
  // 1e-12 * max|K| otherwise).
  double pivot_threshold = -1;

  double reg_thr(const StandardQP& qp) const;  // penalty floor

  static SolverConfig noreg() {
    SolverConfig c;
    c.regularized = false;
    c.delta0 = c.rho0 = 0.0;
    return c;
  }
};

struct StartingPoint {
  Vec x, y, z;
};

// Shift logic applied to the least-squares point (x~, y~, z~): components in
// I are pushed strictly positive, z on F is zeroed. Exposed separately so the
// shifts can be checked against hand values independent of the CG solves.
StartingPoint starting_point_from_tilde(const StandardQP& qp, const Vec& xt,
                                        const Vec& yt, const Vec& zt);

// x~ = A'(AA'+dI)^-1 b, y~ = (AA'+dI)^-1 A(c+Qx~), z~ = c - A'y~ + Qx~
// via pcg_normal with d = 8, then the positivity shifts.
StartingPoint starting_point(const StandardQP& qp);

// tau * min(1, min over dv_i < 0 of -v_i/dv_i), over the I components.
double step_fraction(const Vec& v, const Vec& dv,
                     const std::vector<Index>& nonneg, double tau);

// Corrector targets from the predictor direction: g_alpha is the
// complementarity reached by the trial step, mu_target the centering value
// (g_alpha/x'z)^2 * g_alpha / |I|, and d2 the corrector rhs on the x block
// (zero on F). With a zero predictor d2 reduces to mu X^-1 e.
struct CorrectorTarget {
  double g_alpha = 0;
  double mu_target = 0;
  Vec d2;
};
CorrectorTarget corrector_target(const Vec& x, const Vec& z, const Vec& dxp,
                                 const Vec& dzp, double alpha_x, double alpha_z,
                                 const std::vector<Index>& nonneg);

struct PenaltyState {
  double delta = 8, rho = 8;
  Vec lambda, zeta;        // dual / primal proximal estimates
  int k_since_lambda = 0;  // iterations since lambda moved
  int k_since_zeta = 0;    // iterations since zeta moved
};

// Proximal estimate and penalty update: r = |mu_k - mu_next| / mu_k. A 5%
// drop in ||Ax-b|| updates lambda and sets delta *= (1-r), otherwise
// delta *= (1-r/3); mirrored on the dual residual for zeta/rho. Both
// penalties are floored at reg_floor. Returns true when either estimate
// moved (the staleness counter of each estimate resets when it moves).
bool update_penalties(PenaltyState& ps, const Vec& x, const Vec& y,
                      double mu_prev, double mu_next, double res_p_prev,
                      double res_p_next, double res_d_prev, double res_d_next,
                      double reg_floor);

struct TerminationInput {
  double res_p_rel, res_d_rel, mu;
  double res_p_reg_abs, res_d_reg_abs;  // ||b-Ax-d(y-l)||, ||c+Qx-A'y-z+r(x-z)||
  double dist_zeta, dist_lambda;        // ||x-zeta||, ||y-lambda||
  int k_since_lambda = 0, k_since_zeta = 0, iter = 0;
};

// Optimal / Infeasible / NoConvergence / nullopt (continue).
std::optional<SolveStatus> check_termination(const TerminationInput& t,
                                             const SolverConfig& cfg);

struct IterLogEntry {
  int k;
  double mu, res_p, res_d;      // relative residuals
  double alpha_x, alpha_z;
  double delta, rho;
  bool estimates_updated;
  bool escalated;               // factorization needed escalation this iter
};

struct SolveResult {
  SolveStatus status = SolveStatus::NoConvergence;
  Vec x, y, z;        // standard-form (scaled) space
  double objective = 0;  // standard-form objective at x
  double res_primal = 0, res_dual = 0, mu = 0;  // final relative residuals
  int iterations = 0;
  std::vector<IterLogEntry> log;

  // instrumentation for the solver-level guarantees
  int factorizations = 0;
  int inertia_violations = 0;   // regularized factorizations with wrong inertia
  double max_dir_residual = 0;  // worst relative residual of any direction solve
  int escalations = 0;
  double solve_seconds = 0;
};

// Predictor-corrector interior point iteration with proximal penalty terms
// on a standard-form problem (assumed row-scaled by the caller when desired).
SolveResult solve(const StandardQP& qp, const SolverConfig& cfg = {});

// Mapped-back view of a solve: x/y/z in original-problem coordinates and the
// sense-corrected objective value.
struct OriginalSolution {
  Vec x, y, z;
  double objective = 0;
};
OriginalSolution map_back(const SolveResult& r, const VarMap& map,
                          const RowScaling& scaling);

}  // namespace ippmm
