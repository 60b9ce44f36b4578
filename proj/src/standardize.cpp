#include "ippmm/standardize.hpp"

#include <Eigen/SparseCore>
#include <cmath>
#include <sstream>

namespace ippmm {

double RawProblem::objective_at(const Vec& x) const {
  double v = objective_constant;
  for (int j = 0; j < num_cols(); ++j) v += c[j] * x[j];
  for (const auto& q : quad) {
    double term = 0.5 * q.value * x[q.i] * x[q.j];
    v += q.i == q.j ? term : 2 * term;
  }
  return v;
}

double RawProblem::feasibility_violation(const Vec& x) const {
  Vec act = Vec::Zero(num_rows());
  for (const auto& e : entries) act[e.row] += e.value * x[e.col];
  double viol = 0;
  for (int i = 0; i < num_rows(); ++i) {
    double lo = -kInf, hi = kInf;
    double r = rhs[i];
    switch (row_relations[i]) {
      case Relation::Eq: lo = hi = r; break;
      case Relation::Le: hi = r; break;
      case Relation::Ge: lo = r; break;
    }
    if (range[i]) {
      double rv = *range[i];
      switch (row_relations[i]) {
        case Relation::Le: lo = r - std::abs(rv); break;
        case Relation::Ge: hi = r + std::abs(rv); break;
        case Relation::Eq:
          if (rv >= 0) hi = r + rv; else lo = r + rv;
          break;
      }
    }
    viol = std::max(viol, act[i] - hi);
    viol = std::max(viol, lo - act[i]);
  }
  for (int j = 0; j < num_cols(); ++j) {
    viol = std::max(viol, lower[j] - x[j]);
    viol = std::max(viol, x[j] - upper[j]);
  }
  return std::max(viol, 0.0);
}

Vec VarMap::x_to_original(const Vec& x_std) const {
  Vec x(vars.size());
  for (size_t j = 0; j < vars.size(); ++j) {
    const auto& r = vars[j];
    x[j] = r.index < 0 ? r.shift : r.sign * x_std[r.index] + r.shift;
  }
  return x;
}

Vec VarMap::z_to_original(const Vec& z_std) const {
  Vec z = Vec::Zero(vars.size());
  for (size_t j = 0; j < vars.size(); ++j) {
    const auto& r = vars[j];
    if (r.index >= 0) z[j] = r.sign * z_std[r.index];
  }
  return z;
}

Vec VarMap::y_to_original(const Vec& y_std) const {
  Vec y = Vec::Zero(rows.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (const auto& [k, coef] : rows[i].terms) y[i] += coef * y_std[k];
  return y;
}

std::pair<StandardQP, VarMap> to_standard_form(const RawProblem& p) {
  const int n0 = p.num_cols();
  const int m0 = p.num_rows();
  const double s = p.sense == ObjSense::Maximize ? -1.0 : 1.0;

  VarMap map;
  map.sense = p.sense;
  map.vars.resize(n0);
  map.rows.resize(m0);

  for (int j = 0; j < n0; ++j)
    if (p.lower[j] > p.upper[j])
      throw ModelError("variable '" + p.col_names[j] + "' has lower bound " +
                       std::to_string(p.lower[j]) + " above upper bound " +
                       std::to_string(p.upper[j]));

  // x_orig = P x_main + t; P has one +-1 entry per kept column.
  std::vector<Eigen::Triplet<double>> p_trip;
  Vec t = Vec::Zero(n0);
  std::vector<int> upper_slack_row_of;  // main cols needing a bound row
  std::vector<double> upper_slack_rhs;
  Index n_main = 0;
  std::vector<bool> is_free(n0, false);

  for (int j = 0; j < n0; ++j) {
    double lo = p.lower[j], hi = p.upper[j];
    auto& rule = map.vars[j];
    if (lo == hi) {  // fixed, substitute out
      rule.index = -1;
      rule.shift = lo;
      t[j] = lo;
      ++map.fixed_substituted;
      continue;
    }
    Index idx = n_main++;
    rule.index = idx;
    if (std::isinf(lo) && std::isinf(hi)) {  // free
      rule.sign = 1;
      rule.shift = 0;
      is_free[j] = true;
      p_trip.emplace_back(j, idx, 1.0);
    } else if (!std::isinf(lo)) {  // shift lower bound to zero
      rule.sign = 1;
      rule.shift = lo;
      t[j] = lo;
      if (lo != 0) ++map.shifts_applied;
      p_trip.emplace_back(j, idx, 1.0);
      if (!std::isinf(hi)) {
        upper_slack_row_of.push_back(static_cast<int>(idx));
        upper_slack_rhs.push_back(hi - lo);
      }
    } else {  // upper bound only: x = hi - x'
      rule.sign = -1;
      rule.shift = hi;
      t[j] = hi;
      ++map.flipped;
      ++map.shifts_applied;
      p_trip.emplace_back(j, idx, -1.0);
    }
  }

  SpMat P(n0, n_main);
  P.setFromTriplets(p_trip.begin(), p_trip.end());

  SpMat A0(m0, n0);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(p.entries.size());
    for (const auto& e : p.entries) trip.emplace_back(e.row, e.col, e.value);
    A0.setFromTriplets(trip.begin(), trip.end());
  }
  SpMat Q0(n0, n0);
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& q : p.quad) {
      trip.emplace_back(q.i, q.j, s * q.value);
      if (q.i != q.j) trip.emplace_back(q.j, q.i, s * q.value);
    }
    Q0.setFromTriplets(trip.begin(), trip.end());
  }
  Vec c0(n0);
  for (int j = 0; j < n0; ++j) c0[j] = s * p.c[j];

  Vec c_main = P.transpose() * Vec(c0 + Q0 * t);
  SpMat Q_main = SpMat(P.transpose() * Q0) * P;
  map.objective_constant =
      c0.dot(t) + 0.5 * t.dot(Q0 * t) + s * p.objective_constant;
  Vec b0 = Vec::Zero(m0);
  for (int i = 0; i < m0; ++i) b0[i] = p.rhs[i];
  Vec shift_act = A0 * t;

  // Emit constraint rows. Each entry: (original row, rhs, slack sign) where
  // slack sign 0 means equality.
  struct RowSpec { int orig; double rhs; int slack; };
  std::vector<RowSpec> specs;
  for (int i = 0; i < m0; ++i) {
    double r = b0[i] - shift_act[i];
    Relation rel = p.row_relations[i];
    if (p.range[i]) {
      double rv = *p.range[i];
      double lo, hi;
      switch (rel) {
        case Relation::Le: lo = r - std::abs(rv); hi = r; break;
        case Relation::Ge: lo = r; hi = r + std::abs(rv); break;
        default: lo = rv >= 0 ? r : r + rv; hi = rv >= 0 ? r + rv : r; break;
      }
      specs.push_back({i, lo, -1});  // a'x - s = lo
      specs.push_back({i, hi, +1});  // a'x + s = hi
    } else {
      int slack = rel == Relation::Le ? +1 : rel == Relation::Ge ? -1 : 0;
      specs.push_back({i, r, slack});
    }
  }

  const Index m_std = static_cast<Index>(specs.size()) +
                      static_cast<Index>(upper_slack_row_of.size());
  Index n_slack = 0;
  for (const auto& sp : specs)
    if (sp.slack != 0) ++n_slack;
  n_slack += static_cast<Index>(upper_slack_row_of.size());
  const Index n_std = n_main + n_slack;

  Eigen::SparseMatrix<double, Eigen::RowMajor> A_main_rows = A0 * P;

  StandardQP qp;
  qp.n = n_std;
  qp.m = m_std;
  qp.b = Vec::Zero(m_std);
  qp.c = Vec::Zero(n_std);
  qp.c.head(n_main) = c_main;

  std::vector<Eigen::Triplet<double>> a_trip;
  Index next_slack = n_main;
  for (size_t k = 0; k < specs.size(); ++k) {
    const auto& sp = specs[k];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             A_main_rows, sp.orig);
         it; ++it)
      a_trip.emplace_back(static_cast<Index>(k), it.col(), it.value());
    if (sp.slack != 0) {
      a_trip.emplace_back(static_cast<Index>(k), next_slack,
                          static_cast<double>(sp.slack));
      ++next_slack;
      ++map.slacks_added;
    }
    qp.b[static_cast<Index>(k)] = sp.rhs;
    map.rows[sp.orig].terms.emplace_back(static_cast<Index>(k), 1.0);
  }
  for (size_t k = 0; k < upper_slack_row_of.size(); ++k) {
    Index row = static_cast<Index>(specs.size() + k);
    a_trip.emplace_back(row, upper_slack_row_of[k], 1.0);
    a_trip.emplace_back(row, next_slack, 1.0);
    qp.b[row] = upper_slack_rhs[k];
    ++next_slack;
    ++map.rows_added;
    ++map.slacks_added;
  }
  qp.A.resize(m_std, n_std);
  qp.A.setFromTriplets(a_trip.begin(), a_trip.end());
  qp.A.prune(0.0, 0.0);
  qp.A.makeCompressed();

  qp.Q.resize(n_std, n_std);
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < Q_main.outerSize(); ++k)
      for (SpMat::InnerIterator it(Q_main, k); it; ++it)
        if (it.value() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    qp.Q.setFromTriplets(trip.begin(), trip.end());
  }
  qp.Q.makeCompressed();

  for (int j = 0; j < n0; ++j)
    if (is_free[j]) qp.free.push_back(map.vars[j].index);
  for (Index jj = 0; jj < n_std; ++jj) {
    bool fr = false;
    for (Index f : qp.free)
      if (f == jj) { fr = true; break; }
    if (!fr) qp.nonneg.push_back(jj);
  }

  // zero rows are kept; flag them
  std::vector<int> nnz_row(m_std, 0);
  for (Index k = 0; k < qp.A.outerSize(); ++k)
    for (SpMat::InnerIterator it(qp.A, k); it; ++it) ++nnz_row[it.row()];
  for (Index i = 0; i < m_std; ++i)
    if (nnz_row[i] == 0) {
      std::string nm = i < static_cast<Index>(specs.size())
                           ? p.row_names[specs[static_cast<size_t>(i)].orig]
                           : std::to_string(i);
      qp.warnings.push_back("row '" + nm + "' has no nonzero coefficients");
    }

  return {std::move(qp), std::move(map)};
}

std::string standardization_report(const VarMap& map) {
  std::ostringstream os;
  os << "sense: "
     << (map.sense == ObjSense::Maximize ? "maximize (negated)" : "minimize")
     << "\n"
     << "objective constant: " << map.objective_constant << "\n"
     << "variables: " << map.vars.size() << " original\n"
     << "  fixed substituted out: " << map.fixed_substituted << "\n"
     << "  shifted: " << map.shifts_applied << "\n"
     << "  sign-flipped: " << map.flipped << "\n"
     << "rows added for upper bounds: " << map.rows_added << "\n"
     << "slack columns added: " << map.slacks_added << "\n";
  return os.str();
}

}  // namespace ippmm
