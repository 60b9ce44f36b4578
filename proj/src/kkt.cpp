#include "ippmm/kkt.hpp"

#include <cmath>
#include <stdexcept>

namespace ippmm {

AugmentedSystem assemble(const StandardQP& qp, const Vec& x, const Vec& z,
                         double rho, double delta) {
  const Index n = qp.n, m = qp.m;
  Vec theta_inv = Vec::Zero(n);
  for (Index i : qp.nonneg) {
    if (!(x[i] > 0) || !(z[i] > 0))
      throw std::domain_error("assemble: nonpositive x or z on a nonnegative "
                              "component (index " + std::to_string(i) + ")");
    theta_inv[i] = z[i] / x[i];
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(qp.Q.nonZeros() + 2 * qp.A.nonZeros() + n + m);
  for (Index k = 0; k < qp.Q.outerSize(); ++k)
    for (SpMat::InnerIterator it(qp.Q, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), -it.value());
  for (Index i = 0; i < n; ++i)
    trip.emplace_back(i, i, -(theta_inv[i] + rho));
  for (Index k = 0; k < qp.A.outerSize(); ++k)
    for (SpMat::InnerIterator it(qp.A, k); it; ++it) {
      trip.emplace_back(n + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), n + it.row(), it.value());
    }
  for (Index i = 0; i < m; ++i) trip.emplace_back(n + i, n + i, delta);

  AugmentedSystem sys;
  sys.n = n;
  sys.m = m;
  sys.rho = rho;
  sys.delta = delta;
  sys.K.resize(n + m, n + m);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.makeCompressed();
  return sys;
}

namespace {

// Natural-order elimination with diagonal pivots; aborts on a pivot at or
// below the threshold. a is destroyed; the strict lower triangle of l and d
// come back filled.
bool dense_ldlt_kernel(Eigen::MatrixXd& a, Eigen::MatrixXd& l, Vec& d,
                       double piv_tol) {
  const Index nn = a.rows();
  l.setIdentity(nn, nn);
  d.resize(nn);
  for (Index k = 0; k < nn; ++k) {
    double piv = a(k, k);
    if (!std::isfinite(piv) || std::abs(piv) <= piv_tol) return false;
    d[k] = piv;
    const Index r = nn - k - 1;
    if (r > 0) {
      l.col(k).tail(r) = a.col(k).tail(r) / piv;
      a.bottomRightCorner(r, r).noalias() -=
          l.col(k).tail(r) * a.col(k).tail(r).transpose();
    }
  }
  return true;
}

Inertia inertia_of(const Vec& d, double zero_tol) {
  Inertia in;
  for (Index i = 0; i < d.size(); ++i) {
    if (std::abs(d[i]) <= zero_tol) ++in.zero;
    else if (d[i] > 0) ++in.positive;
    else ++in.negative;
  }
  return in;
}

}  // namespace

KKTFactorization factorize(const AugmentedSystem& sys, double pivot_threshold,
                           Index dense_limit) {
  KKTFactorization f;
  f.K_ = sys.K;
  const Index nn = sys.K.rows();
  const bool regularized = sys.rho > 0 && sys.delta > 0;
  const FactorStatus fail_status =
      regularized ? FactorStatus::instability : FactorStatus::singular;

  f.dense_ = nn <= dense_limit;
  bool ok;
  if (f.dense_) {
    Eigen::MatrixXd a(sys.K);
    ok = dense_ldlt_kernel(a, f.L_, f.d_, pivot_threshold);
  } else {
    f.ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    f.ldlt_->compute(sys.K);
    ok = f.ldlt_->info() == Eigen::Success;
    if (ok) {
      f.d_ = f.ldlt_->vectorD();
      for (Index i = 0; i < nn && ok; ++i)
        if (!std::isfinite(f.d_[i]) || std::abs(f.d_[i]) <= pivot_threshold)
          ok = false;
    }
  }
  if (!ok) {
    f.status = fail_status;
    return f;
  }
  f.status = FactorStatus::ok;
  f.inertia = inertia_of(f.d_, 1e-30);
  return f;
}

Vec KKTFactorization::solve_once(const Vec& rhs) const {
  if (dense_) {
    Vec v = L_.triangularView<Eigen::UnitLower>().solve(rhs);
    v.array() /= d_.array();
    return L_.transpose().triangularView<Eigen::UnitUpper>().solve(v);
  }
  return ldlt_->solve(rhs);
}

double KKTFactorization::solve(const Vec& rhs, Vec& u, double kappa) const {
  u = solve_once(rhs);
  const double scale = 1.0 + rhs.norm();
  Vec r = rhs - K_ * u;
  double rel = r.norm() / scale;
  for (int pass = 0; pass < 8 && rel > kappa; ++pass) {
    Vec u_try = u + solve_once(r);
    Vec r_try = rhs - K_ * u_try;
    double rel_try = r_try.norm() / scale;
    if (rel_try >= rel) break;  // refinement stagnated; keep the best iterate
    u = std::move(u_try);
    r = std::move(r_try);
    rel = rel_try;
  }
  return rel;
}

double KKTFactorization::reconstruction_error() const {
  Eigen::MatrixXd rec;
  if (dense_) {
    rec = L_ * d_.asDiagonal() * L_.transpose();
  } else {
    SpMat l = ldlt_->matrixL();
    SpMat mid = SpMat(l * d_.asDiagonal()) * SpMat(l.transpose());
    const auto& P = ldlt_->permutationP();
    rec = Eigen::MatrixXd(P.transpose() * mid * P);
  }
  return (rec - Eigen::MatrixXd(K_)).cwiseAbs().maxCoeff();
}

PcgResult pcg_normal(const SpMat& A, double delta, const Vec& rhs, double tol,
                     int maxit) {
  const Index m = A.rows();
  PcgResult res;
  res.w = Vec::Zero(m);
  if (m == 0 || rhs.norm() == 0) {
    res.converged = true;
    return res;
  }
  if (maxit < 0) maxit = static_cast<int>(2 * m + 10);

  Vec diag = Vec::Constant(m, delta);
  for (Index k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      diag[it.row()] += it.value() * it.value();
  for (Index i = 0; i < m; ++i)
    if (diag[i] <= 0) diag[i] = 1;  // zero row and delta = 0

  auto apply = [&](const Vec& v) -> Vec {
    return A * (A.transpose() * v) + delta * v;
  };

  const double target = tol * rhs.norm();
  Vec r = rhs;
  Vec s = r.cwiseQuotient(diag);
  Vec p = s;
  double rs = r.dot(s);
  for (int it = 0; it < maxit; ++it) {
    if (r.norm() <= target) break;
    Vec ap = apply(p);
    double alpha = rs / p.dot(ap);
    res.w += alpha * p;
    r -= alpha * ap;
    ++res.iterations;
    s = r.cwiseQuotient(diag);
    double rs_new = r.dot(s);
    p = s + (rs_new / rs) * p;
    rs = rs_new;
  }
  res.rel_residual = r.norm() / rhs.norm();
  res.converged = r.norm() <= target;
  return res;
}

}  // namespace ippmm
