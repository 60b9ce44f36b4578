#pragma once

#include <string>
#include <vector>

#include "ippmm/problem.hpp"

namespace ippmm {

// Parameters of the neighborhood-based variant. Requires I = {0..n-1}.
struct TheoryParams {
  double tol = 1e-6;
  double sigma = 0.3;           // centering, clamped to [sigma_min, sigma_max]
  double sigma_min = 0.05;
  double sigma_max = 0.5;
  double gamma_semi = 0.9;      // semi-norm radius factor (of rho0_start)
  double gamma_mu = 0.1;        // centrality floor
  double c_norm = -1;           // 2-norm radius; < 0: 1e4*max(1,||(bbar,cbar)||)
  double rho0_start = -1;       // < 0: max(10, 1.5*||(b,c)||_inf)
  double backtrack = 0.9;
  double alpha_min = 1e-10;
  long max_iterations = -1;     // < 0: ceil(10 n^4 |log tol|)
};

struct TheoryState {
  Vec x, y, z;
  Vec zeta, lambda;
  Vec b_bar, c_bar;  // Ax0 - b, -Qx0 + A'y0 + z0 - c
  double mu = 0, mu0 = 0;
  double rho0_start = 0, c_norm = 0;  // resolved parameter values
};

// x0 = z0 = rho0_start * e, y0 = e, mu0 = rho0_start^2; perturbations b_bar,
// c_bar make the start exactly feasible for the perturbed pair.
TheoryState theory_starting_point(const StandardQP& qp, TheoryParams params);

// ||(b,c)||_A = min ||(x,z)||_2 over Ax = b, -Qx + A'y + z = c (y free).
// +inf when the system is inconsistent.
double semi_norm(const SpMat& A, const SpMat& Q, const Vec& b_arg,
                 const Vec& c_arg);

struct NeighborhoodReport {
  Vec r_p, r_d;          // scaled-infeasibility residuals at (x,y,z; mu)
  double two_norm = 0;   // ||(b~, c~)||_2
  double seminorm = 0;   // ||(b~, c~)||_A, +inf when inconsistent
  bool seminorm_inconsistent = false;
  double min_centrality = 0;  // min_i x_i z_i / mu
  bool positive = false;      // (x, z) > 0
  bool in_neighborhood = false;
};

NeighborhoodReport neighborhood_check(const StandardQP& qp,
                                      const TheoryState& s, const Vec& x,
                                      const Vec& y, const Vec& z, double mu,
                                      const TheoryParams& params);

struct TheoryIterEntry {
  int k;
  double mu, alpha, sigma;
  double res_p, res_d;        // unscaled residual 2-norms
  double nbhd_two_norm, nbhd_seminorm, min_centrality;
  bool in_neighborhood;
  bool estimates_updated;
  double newton_residual;     // relative residual of the Newton solve
};

// One damped Newton step of the exact method: solves the 3x3 system at
// sigma, backtracks alpha from 1 until mu(alpha) <= (1 - 0.01 alpha) mu and
// the candidate lies in the neighborhood, updates (zeta, lambda) when the
// scaled residual conditions hold. Returns false when no acceptable alpha
// >= alpha_min exists.
bool theory_step(const StandardQP& qp, TheoryState& s,
                 const TheoryParams& params, TheoryIterEntry& entry);

enum class TheoryStatus { Optimal, IterationLimit, StepFailure };

struct TheoryResult {
  TheoryStatus status = TheoryStatus::IterationLimit;
  Vec x, y, z;
  double mu = 0;
  double res_p = 0, res_d = 0;
  long iterations = 0;
  std::vector<TheoryIterEntry> trace;
};

TheoryResult theory_solve(const StandardQP& qp, TheoryParams params = {});

std::string trace_to_csv(const std::vector<TheoryIterEntry>& trace);

}  // namespace ippmm
