#include "ippmm/theory.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace ippmm {

namespace {

void require_all_nonneg(const StandardQP& qp) {
  if (!qp.free.empty())
    throw ModelError("theory mode requires every variable nonnegative "
                     "(no free variables)");
}

}  // namespace

TheoryState theory_starting_point(const StandardQP& qp, TheoryParams params) {
  require_all_nonneg(qp);
  TheoryState s;
  double data_inf = 0;
  if (qp.b.size()) data_inf = qp.b.cwiseAbs().maxCoeff();
  if (qp.c.size()) data_inf = std::max(data_inf, qp.c.cwiseAbs().maxCoeff());
  s.rho0_start = params.rho0_start > 0 ? params.rho0_start
                                       : std::max(10.0, 1.5 * data_inf);
  s.x = Vec::Constant(qp.n, s.rho0_start);
  s.z = Vec::Constant(qp.n, s.rho0_start);
  s.y = Vec::Ones(qp.m);
  s.mu0 = s.mu = s.rho0_start * s.rho0_start;
  s.b_bar = qp.A * s.x - qp.b;
  s.c_bar = -(qp.Q * s.x) + qp.A.transpose() * s.y + s.z - qp.c;
  s.zeta = s.x;
  s.lambda = s.y;
  double pert = std::sqrt(s.b_bar.squaredNorm() + s.c_bar.squaredNorm());
  s.c_norm = params.c_norm > 0 ? params.c_norm : 1e4 * std::max(1.0, pert);
  return s;
}

double semi_norm(const SpMat& A, const SpMat& Q, const Vec& b_arg,
                 const Vec& c_arg) {
  const Index m = A.rows(), n = A.cols();
  Eigen::MatrixXd Ad(A), Qd(Q);

  Vec x_p = Vec::Zero(n);
  Eigen::MatrixXd N;  // orthonormal null-space basis of A
  if (m > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        Ad, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv[0] : 0.0;
    double rank_tol = std::max(m, n) * 1e-14 * std::max(smax, 1e-300);
    Index r = 0;
    while (r < sv.size() && sv[r] > rank_tol) ++r;
    Vec ub = svd.matrixU().transpose() * b_arg;
    for (Index i = 0; i < r; ++i)
      x_p += svd.matrixV().col(i) * (ub[i] / sv[i]);
    if ((Ad * x_p - b_arg).norm() > 1e-10 * (1.0 + b_arg.norm()))
      return kInf;  // b_arg not in the range of A
    N = svd.matrixV().rightCols(n - r);
  } else {
    if (b_arg.size() != 0 && b_arg.norm() > 0) return kInf;
    N = Eigen::MatrixXd::Identity(n, n);
  }

  // x = x_p + N v; best z for fixed x has norm ||N'(c_arg + Q x)||;
  // minimize ||v||^2 + ||G v + h||^2
  const Index k = N.cols();
  if (k == 0) {
    // null(A) = {0}: range(A') is everything, so z can be driven to 0
    return x_p.norm();
  }
  Eigen::MatrixXd G = N.transpose() * Qd * N;
  Vec h = N.transpose() * (c_arg + Qd * x_p);
  Eigen::MatrixXd M =
      Eigen::MatrixXd::Identity(k, k) + G.transpose() * G;
  Vec v = M.llt().solve(-G.transpose() * h);
  double val = x_p.squaredNorm() + v.squaredNorm() + (G * v + h).squaredNorm();
  return std::sqrt(val);
}

NeighborhoodReport neighborhood_check(const StandardQP& qp,
                                      const TheoryState& s, const Vec& x,
                                      const Vec& y, const Vec& z, double mu,
                                      const TheoryParams& params) {
  NeighborhoodReport rep;
  rep.r_p = qp.A * x + mu * (y - s.lambda) - qp.b - (mu / s.mu0) * s.b_bar;
  rep.r_d = -(qp.Q * x) + qp.A.transpose() * y + z - mu * (x - s.zeta) -
            qp.c - (mu / s.mu0) * s.c_bar;
  if (!(mu > 0)) {
    rep.two_norm = kInf;
    rep.seminorm = kInf;
    return rep;
  }
  Vec b_t = (s.mu0 / mu) * rep.r_p;
  Vec c_t = (s.mu0 / mu) * rep.r_d;
  rep.two_norm = std::sqrt(b_t.squaredNorm() + c_t.squaredNorm());
  rep.seminorm = semi_norm(qp.A, qp.Q, b_t, c_t);
  rep.seminorm_inconsistent = std::isinf(rep.seminorm);
  rep.positive = x.size() == 0 || (x.minCoeff() > 0 && z.minCoeff() > 0);
  rep.min_centrality = kInf;
  for (Index i = 0; i < x.size(); ++i)
    rep.min_centrality = std::min(rep.min_centrality, x[i] * z[i] / mu);
  rep.in_neighborhood = rep.two_norm <= s.c_norm &&
                        rep.seminorm <= params.gamma_semi * s.rho0_start &&
                        rep.min_centrality >= params.gamma_mu && rep.positive;
  return rep;
}

bool theory_step(const StandardQP& qp, TheoryState& s,
                 const TheoryParams& params, TheoryIterEntry& entry) {
  require_all_nonneg(qp);
  const Index n = qp.n, m = qp.m;
  const double sigma =
      std::clamp(params.sigma, params.sigma_min, params.sigma_max);
  const double mu = s.mu, mu0 = s.mu0;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n + m, 2 * n + m);
  Eigen::MatrixXd Ad(qp.A), Qd(qp.Q);
  J.topLeftCorner(n, n) = -(Qd + mu * Eigen::MatrixXd::Identity(n, n));
  J.block(0, n, n, m) = Ad.transpose();
  J.block(0, n + m, n, n) = Eigen::MatrixXd::Identity(n, n);
  J.block(n, 0, m, n) = Ad;
  J.block(n, n, m, m) = mu * Eigen::MatrixXd::Identity(m, m);
  J.block(n + m, 0, n, n) = s.z.asDiagonal();
  J.bottomRightCorner(n, n) = s.x.asDiagonal();

  Vec f1 = qp.c + (sigma * mu / mu0) * s.c_bar + Qd * s.x -
           Ad.transpose() * s.y - s.z + sigma * mu * (s.x - s.zeta);
  Vec f2 = Ad * s.x + sigma * mu * (s.y - s.lambda) - qp.b -
           (sigma * mu / mu0) * s.b_bar;
  Vec f3 = s.x.cwiseProduct(s.z) - Vec::Constant(n, sigma * mu);
  Vec rhs(2 * n + m);
  rhs.head(n) = f1;
  rhs.segment(n, m) = -f2;
  rhs.tail(n) = -f3;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  Vec du = lu.solve(rhs);
  double scale = 1.0 + rhs.norm();
  Vec resid = rhs - J * du;
  if (resid.norm() / scale > 1e-12) {
    du += lu.solve(resid);
    resid = rhs - J * du;
  }
  entry.newton_residual = resid.norm() / scale;

  Vec dx = du.head(n), dy = du.segment(n, m), dz = du.tail(n);

  double alpha = 1.0;
  while (alpha >= params.alpha_min) {
    Vec xa = s.x + alpha * dx;
    Vec ya = s.y + alpha * dy;
    Vec za = s.z + alpha * dz;
    double mua = n > 0 ? xa.dot(za) / static_cast<double>(n) : 0.0;
    if (mua <= (1.0 - 0.01 * alpha) * mu && mua > 0) {
      NeighborhoodReport rep =
          neighborhood_check(qp, s, xa, ya, za, mua, params);
      if (rep.in_neighborhood) {
        s.x = xa;
        s.y = ya;
        s.z = za;
        s.mu = mua;
        entry.alpha = alpha;
        entry.sigma = sigma;
        entry.mu = mua;
        entry.nbhd_two_norm = rep.two_norm;
        entry.nbhd_seminorm = rep.seminorm;
        entry.min_centrality = rep.min_centrality;
        entry.in_neighborhood = true;

        // oriented exactly like the membership residuals (with the new
        // anchors the proximal terms vanish), so accepting the update can
        // never push the accepted iterate outside its own neighborhood;
        // the 2-norm is sign-blind but the semi-norm is not
        Vec rp_u = qp.A * s.x - qp.b - (mua / mu0) * s.b_bar;
        Vec rd_u = -(Qd * s.x) + qp.A.transpose() * s.y + s.z - qp.c -
                   (mua / mu0) * s.c_bar;
        double two = std::sqrt(rp_u.squaredNorm() + rd_u.squaredNorm());
        entry.estimates_updated = false;
        if (two <= s.c_norm * mua / mu0) {
          double semi = semi_norm(qp.A, qp.Q, rp_u, rd_u);
          if (semi <= params.gamma_semi * s.rho0_start * mua / mu0) {
            s.zeta = s.x;
            s.lambda = s.y;
            entry.estimates_updated = true;
          }
        }
        entry.res_p = (qp.A * s.x - qp.b).norm();
        entry.res_d =
            (qp.c + Qd * s.x - qp.A.transpose() * s.y - s.z).norm();
        return true;
      }
    }
    alpha *= params.backtrack;
  }
  return false;
}

TheoryResult theory_solve(const StandardQP& qp, TheoryParams params) {
  require_all_nonneg(qp);
  TheoryResult out;
  TheoryState s = theory_starting_point(qp, params);
  long cap = params.max_iterations;
  if (cap < 0) {
    double n4 = std::pow(static_cast<double>(std::max<Index>(qp.n, 1)), 4);
    cap = static_cast<long>(std::ceil(10.0 * n4 *
                                      std::abs(std::log(params.tol))));
  }

  for (long k = 0;; ++k) {
    double res_p = (qp.A * s.x - qp.b).norm();
    double res_d =
        (qp.c + qp.Q * s.x - qp.A.transpose() * s.y - s.z).norm();
    out.x = s.x;
    out.y = s.y;
    out.z = s.z;
    out.mu = s.mu;
    out.res_p = res_p;
    out.res_d = res_d;
    out.iterations = k;
    if (res_p < params.tol && res_d < params.tol && s.mu < params.tol) {
      out.status = TheoryStatus::Optimal;
      return out;
    }
    if (k >= cap) {
      out.status = TheoryStatus::IterationLimit;
      return out;
    }
    TheoryIterEntry entry{};
    entry.k = static_cast<int>(k);
    if (!theory_step(qp, s, params, entry)) {
      out.status = TheoryStatus::StepFailure;
      return out;
    }
    out.trace.push_back(entry);
  }
}

std::string trace_to_csv(const std::vector<TheoryIterEntry>& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "k,mu,alpha,sigma,res_p,res_d,nbhd_two_norm,nbhd_seminorm,"
        "min_centrality,in_neighborhood,estimates_updated,newton_residual\n";
  for (const auto& e : trace)
    os << e.k << ',' << e.mu << ',' << e.alpha << ',' << e.sigma << ','
       << e.res_p << ',' << e.res_d << ',' << e.nbhd_two_norm << ','
       << e.nbhd_seminorm << ',' << e.min_centrality << ','
       << (e.in_neighborhood ? 1 : 0) << ',' << (e.estimates_updated ? 1 : 0)
       << ',' << e.newton_residual << '\n';
  return os.str();
}

}  // namespace ippmm
