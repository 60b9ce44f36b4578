#pragma once

#include <Eigen/SparseCholesky>
#include <memory>

#include "ippmm/problem.hpp"

namespace ippmm {

// K = [ -(Q + Theta^-1 + rho I)   A'      ]   with Theta^-1 = X^-1 Z on I,
//     [  A                        delta I ]        Theta^-1 = 0 on F.
struct AugmentedSystem {
  SpMat K;  // (n+m) x (n+m), symmetric, both triangles stored
  Index n = 0, m = 0;
  double rho = 0, delta = 0;
};

// Builds K at the current iterate. Throws std::domain_error when some x_i or
// z_i with i in I is not strictly positive.
AugmentedSystem assemble(const StandardQP& qp, const Vec& x, const Vec& z,
                         double rho, double delta);

enum class FactorStatus {
  ok,
  singular,     // tiny/zero pivot with rho or delta at 0
  instability,  // breakdown despite active regularization
};

struct Inertia {
  Index positive = 0, negative = 0, zero = 0;
  bool operator==(const Inertia&) const = default;
};

// LDL' with diagonal pivots only. Sparse backend: AMD-ordered simplicial
// LDL'; dense backend: natural-order elimination (no permutation), used by
// default when n+m <= dense_limit. Factors stay valid for any number of
// concurrent solve_factored calls.
class KKTFactorization {
 public:
  FactorStatus status = FactorStatus::singular;
  Inertia inertia;

  // Diagonal of D in elimination order (dense backend: natural order).
  const Vec& diag() const { return d_; }

  // Solves K u = rhs; iterates refinement while the relative residual
  // exceeds kappa and keeps improving. Returns the final relative residual
  // ||K u - rhs|| / (1 + ||rhs||).
  double solve(const Vec& rhs, Vec& u, double kappa = 1e-8) const;

  // max-norm of P'LDL'P - K, for factorization-quality checks.
  double reconstruction_error() const;

 private:
  friend KKTFactorization factorize(const AugmentedSystem&, double, Index);
  bool dense_ = true;
  Eigen::MatrixXd L_;  // unit lower triangle (dense backend)
  Vec d_;
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;  // sparse backend
  SpMat K_;  // kept for refinement and residuals
  Vec solve_once(const Vec& rhs) const;
};

// pivot_threshold: pivots with |d| <= pivot_threshold abort the
// factorization; status distinguishes singular (no regularization) from
// instability (regularization active). A negative dense_limit forces the
// sparse backend, dense_limit >= n+m forces the dense one.
KKTFactorization factorize(const AugmentedSystem& sys, double pivot_threshold,
                           Index dense_limit = 500);

struct PcgResult {
  Vec w;
  int iterations = 0;
  bool converged = false;
  double rel_residual = 0;
};

// Jacobi-preconditioned CG on (A A' + delta I) w = rhs, matrix-free.
// Preconditioner diag(A A') + delta I; tol is relative to ||rhs||;
// maxit defaults to 2m + 10.
PcgResult pcg_normal(const SpMat& A, double delta, const Vec& rhs,
                     double tol = 1e-8, int maxit = -1);

}  // namespace ippmm
