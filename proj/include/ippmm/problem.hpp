#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ippmm {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { Eq, Le, Ge };
enum class ObjSense { Minimize, Maximize };

// Thrown on malformed input files; line is 1-based.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

// Thrown on structurally invalid models (e.g. lower bound above upper bound).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem as read from file: c'x + x'Qx/2 over rows with relations and bounds.
// Quadratic entries are stored once per unordered pair (i >= j) and denote the
// full symmetric Q, i.e. Q(i,j) = Q(j,i) = value.
struct RawProblem {
  std::string name;
  ObjSense sense = ObjSense::Minimize;

  std::vector<std::string> row_names;
  std::vector<Relation> row_relations;
  std::vector<std::string> col_names;

  struct Entry {
    int row;  // constraint row index
    int col;
    double value;
  };
  std::vector<Entry> entries;

  std::vector<double> c;          // per column
  std::vector<double> rhs;        // per row, default 0
  double objective_constant = 0;  // from an RHS entry on the objective row

  std::vector<std::optional<double>> range;  // per row, RANGES section

  std::vector<double> lower;  // per column, default 0
  std::vector<double> upper;  // per column, default +inf

  struct QuadEntry {
    int i, j;  // i >= j
    double value;
  };
  std::vector<QuadEntry> quad;

  int num_rows() const { return static_cast<int>(row_names.size()); }
  int num_cols() const { return static_cast<int>(col_names.size()); }

  // Q(i,j) by scanning the symmetric entry list (test/diagnostic use).
  double quad_value(int i, int j) const {
    int a = std::max(i, j), b = std::min(i, j);
    double v = 0;
    for (const auto& q : quad)
      if (q.i == a && q.j == b) v += q.value;
    return v;
  }

  double objective_at(const Vec& x) const;
  // Max violation over rows and bounds at x (0 means feasible).
  double feasibility_violation(const Vec& x) const;
};

// min c'x + x'Qx/2  s.t.  Ax = b, x_I >= 0, x_F free.
struct StandardQP {
  Index n = 0, m = 0;
  SpMat A;  // m x n, no explicitly stored zeros
  SpMat Q;  // n x n, symmetric, both triangles stored
  Vec b, c;
  std::vector<Index> nonneg;   // I, ascending
  std::vector<Index> free;     // F, ascending
  std::vector<std::string> warnings;

  double objective_at(const Vec& x) const {
    return c.dot(x) + 0.5 * x.dot(Q * x);
  }
};

// Invertible record of the standard-form transformation.
// Original variable j:  x_orig[j] = sign*x_std[index] + shift, or the fixed
// value when index < 0 (variable substituted out).
struct VarMap {
  ObjSense sense = ObjSense::Minimize;
  // standard objective + objective_constant equals the minimized original
  // objective; for maximization the original objective is the negation.
  double objective_constant = 0;

  struct VarRule {
    Index index = -1;
    double sign = 1.0;
    double shift = 0.0;  // holds the fixed value when index < 0
  };
  std::vector<VarRule> vars;  // per original column

  // y_orig[i] = sum of coef*y_std[k] over the standard rows row i became.
  struct RowRule {
    std::vector<std::pair<Index, double>> terms;
  };
  std::vector<RowRule> rows;  // per original row

  int rows_added = 0;    // slack rows for variable upper bounds
  int slacks_added = 0;  // slack columns (inequalities + bound rows)
  int shifts_applied = 0;
  int fixed_substituted = 0;
  int flipped = 0;

  Vec x_to_original(const Vec& x_std) const;
  Vec z_to_original(const Vec& z_std) const;  // fixed vars get 0
  Vec y_to_original(const Vec& y_std) const;
  double objective_to_original(double std_objective) const {
    double v = std_objective + objective_constant;
    return sense == ObjSense::Maximize ? -v : v;
  }
};

}  // namespace ippmm
