#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ippmm/standardize.hpp"
#include "oracles.hpp"

using namespace ippmm;

namespace {

// Incremental RawProblem assembly for hand-built cases.
struct Builder {
  RawProblem p;

  int row(const std::string& name, Relation rel, double rhs,
          std::optional<double> range = std::nullopt) {
    p.row_names.push_back(name);
    p.row_relations.push_back(rel);
    p.rhs.push_back(rhs);
    p.range.push_back(range);
    return p.num_rows() - 1;
  }
  int col(const std::string& name, double c, double lo = 0,
          double up = kInf) {
    p.col_names.push_back(name);
    p.c.push_back(c);
    p.lower.push_back(lo);
    p.upper.push_back(up);
    return p.num_cols() - 1;
  }
  void entry(int r, int c, double v) { p.entries.push_back({r, c, v}); }
  void quad(int i, int j, double v) {
    p.quad.push_back({std::max(i, j), std::min(i, j), v});
  }
};

// Completes a standard-form witness from original-space values: main
// variables via the VarMap rules, slack columns from the row residuals.
Vec std_witness(const StandardQP& qp, const VarMap& map, const Vec& x_orig) {
  std::vector<bool> is_slack(qp.n, true);
  for (const auto& r : map.vars)
    if (r.index >= 0) is_slack[r.index] = false;
  Vec xs = Vec::Zero(qp.n);
  for (size_t j = 0; j < map.vars.size(); ++j) {
    const auto& r = map.vars[j];
    if (r.index >= 0) xs[r.index] = r.sign * (x_orig[j] - r.shift);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> Ar(qp.A);
  for (Index i = 0; i < qp.m; ++i) {
    double act = 0, slack_coef = 0;
    Index slack_col = -1;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Ar, i);
         it; ++it) {
      if (is_slack[it.col()]) {
        slack_col = it.col();
        slack_coef = it.value();
      } else {
        act += it.value() * xs[it.col()];
      }
    }
    if (slack_col >= 0) xs[slack_col] = (qp.b[i] - act) / slack_coef;
  }
  return xs;
}

RawProblem random_raw(std::mt19937& rng, Vec& x_witness) {
  std::uniform_int_distribution<int> nd(2, 5), md(1, 4), kindd(0, 5),
      reld(0, 2), signd(0, 1);
  std::uniform_real_distribution<double> val(-3, 3), pos(0.4, 2.2),
      frac(0.1, 0.9);
  std::bernoulli_distribution fill(0.7), qcoin(0.3), rangecoin(0.35),
      maxcoin(0.5);

  const int n = nd(rng), m = md(rng);
  Builder b;
  b.p.name = "GEN";
  b.p.sense = maxcoin(rng) ? ObjSense::Maximize : ObjSense::Minimize;
  b.p.objective_constant = val(rng);
  x_witness.resize(n);

  for (int j = 0; j < n; ++j) {
    const std::string name = "x" + std::to_string(j);
    switch (kindd(rng)) {
      case 0:
        b.col(name, val(rng));
        x_witness[j] = pos(rng);
        break;
      case 1:
        b.col(name, val(rng), -kInf, kInf);
        x_witness[j] = val(rng);
        break;
      case 2: {
        double lo = val(rng);
        b.col(name, val(rng), lo);
        x_witness[j] = lo + pos(rng);
        break;
      }
      case 3: {
        double up = val(rng);
        b.col(name, val(rng), -kInf, up);
        x_witness[j] = up - pos(rng);
        break;
      }
      case 4: {
        double lo = val(rng), up = lo + pos(rng) + 0.3;
        b.col(name, val(rng), lo, up);
        x_witness[j] = lo + (up - lo) * frac(rng);
        break;
      }
      default: {
        double v = val(rng);
        b.col(name, val(rng), v, v);
        x_witness[j] = v;
        break;
      }
    }
  }

  for (int i = 0; i < m; ++i) {
    const std::string name = "r" + std::to_string(i);
    Relation rel = static_cast<Relation>(reld(rng));
    double act = 0;
    std::vector<std::pair<int, double>> row_entries;
    for (int j = 0; j < n; ++j) {
      if (!fill(rng)) continue;
      double v = val(rng);
      if (v == 0) v = 1.0;
      row_entries.emplace_back(j, v);
      act += v * x_witness[j];
    }
    double g = frac(rng);
    double rhs = act;
    std::optional<double> range;
    if (rel == Relation::Le) rhs = act + g;
    if (rel == Relation::Ge) rhs = act - g;
    if (rangecoin(rng)) {
      if (rel == Relation::Le) {
        range = g + 1.0;  // row interval [rhs - |range|, rhs] contains act
      } else if (rel == Relation::Ge) {
        range = g + 1.0;  // [rhs, rhs + |range|]
      } else if (signd(rng)) {
        rhs = act - g;
        range = g + 1.0;  // [rhs, rhs + range]
      } else {
        rhs = act + g;
        range = -(g + 1.0);  // [rhs + range, rhs]
      }
    }
    int r = b.row(name, rel, rhs, range);
    for (auto [j, v] : row_entries) b.entry(r, j, v);
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (qcoin(rng)) b.quad(i, j, val(rng));
  return b.p;
}

}  // namespace

TEST_CASE("inequality row gains a nonnegative slack") {
  Builder b;
  int r = b.row("r1", Relation::Le, 2.0);
  b.col("x1", 1.0);
  b.col("x2", 0.0);
  b.entry(r, 0, 1.0);
  b.entry(r, 1, 1.0);
  auto [qp, map] = to_standard_form(b.p);

  REQUIRE(qp.m == 1);
  REQUIRE(qp.n == 3);
  Eigen::MatrixXd A = oracle::dense_of(qp.A);
  CHECK(A(0, 0) == 1.0);
  CHECK(A(0, 1) == 1.0);
  CHECK(A(0, 2) == 1.0);
  CHECK(qp.b[0] == 2.0);
  CHECK(qp.nonneg == std::vector<Index>{0, 1, 2});
  CHECK(qp.free.empty());
  CHECK(map.slacks_added == 1);
}

TEST_CASE("lower and upper bounds become a shift plus a slack row") {
  // min x1 + 2 x2 s.t. x1 + x2 >= 4, x1 in [1,3], x2 >= 0
  Builder b;
  int r = b.row("r1", Relation::Ge, 4.0);
  b.col("x1", 1.0, 1.0, 3.0);
  b.col("x2", 2.0);
  b.entry(r, 0, 1.0);
  b.entry(r, 1, 1.0);
  auto [qp, map] = to_standard_form(b.p);

  // shifted x1' = x1 - 1 in [0,2]: one extra row x1' + s = 2
  CHECK(qp.m == 2);
  CHECK(map.rows_added == 1);
  CHECK(map.shifts_applied >= 1);

  auto opt = oracle::enumerate_qp_optimum(qp);
  REQUIRE(opt.has_value());
  // optimum of the original problem is x = (3, 1), objective 5
  CHECK(map.objective_to_original(opt->objective) == doctest::Approx(5.0));
  Vec x_orig = map.x_to_original(opt->x);
  CHECK(x_orig[0] == doctest::Approx(3.0));
  CHECK(x_orig[1] == doctest::Approx(1.0));
  CHECK(b.p.feasibility_violation(x_orig) <= 1e-9);
}

TEST_CASE("all-free columns with equality rows need no slacks") {
  Builder b;
  int r = b.row("r1", Relation::Eq, 1.0);
  b.col("x1", 1.0, -kInf, kInf);
  b.col("x2", 1.0, -kInf, kInf);
  b.entry(r, 0, 1.0);
  b.entry(r, 1, 2.0);
  auto [qp, map] = to_standard_form(b.p);
  CHECK(qp.n == 2);
  CHECK(qp.nonneg.empty());
  CHECK(qp.free == std::vector<Index>{0, 1});
  CHECK(map.slacks_added == 0);
}

TEST_CASE("crossed bounds are a model error") {
  Builder b;
  b.row("r1", Relation::Eq, 0.0);
  b.col("x1", 1.0, 2.0, 1.0);
  CHECK_THROWS_AS(to_standard_form(b.p), ModelError);
}

TEST_CASE("maximization negates the standard objective") {
  Builder b;
  int r = b.row("r1", Relation::Le, 5.0);
  b.col("x1", 3.0);
  b.entry(r, 0, 1.0);
  b.p.sense = ObjSense::Maximize;
  auto [qp, map] = to_standard_form(b.p);
  CHECK(qp.c[0] == -3.0);
  // standard optimum: x1 = 5 with slack 0, std objective -15
  CHECK(map.objective_to_original(-15.0) == doctest::Approx(15.0));
}

TEST_CASE("fixed variables are substituted out") {
  Builder b;
  int r = b.row("r1", Relation::Eq, 7.0);
  b.col("x1", 1.0, 2.0, 2.0);
  b.col("x2", 1.0);
  b.entry(r, 0, 2.0);
  b.entry(r, 1, 1.0);
  auto [qp, map] = to_standard_form(b.p);

  CHECK(qp.n == 1);
  CHECK(map.fixed_substituted == 1);
  CHECK(qp.b[0] == doctest::Approx(3.0));  // 7 - 2*2
  CHECK(map.vars[0].index == -1);
  Vec xs(1);
  xs << 3.0;
  Vec xo = map.x_to_original(xs);
  CHECK(xo[0] == 2.0);
  CHECK(xo[1] == 3.0);
  // objective carries the fixed contribution
  CHECK(map.objective_to_original(qp.objective_at(xs)) ==
        doctest::Approx(b.p.objective_at(xo)));
}

TEST_CASE("ranged rows split into two inequalities") {
  Builder b;
  int r = b.row("r1", Relation::Le, 4.0, 2.0);  // activity in [2, 4]
  b.col("x1", 1.0);
  b.entry(r, 0, 1.0);
  auto [qp, map] = to_standard_form(b.p);

  CHECK(qp.m == 2);
  CHECK(map.slacks_added == 2);
  REQUIRE(map.rows.size() == 1);
  CHECK(map.rows[0].terms.size() == 2);

  // x1 = 3 is interior: both slacks strictly positive
  Vec x1(1);
  x1 << 3.0;
  Vec xs = std_witness(qp, map, x1);
  CHECK((qp.A * xs - qp.b).cwiseAbs().maxCoeff() <= 1e-12);
  for (Index j = 1; j < qp.n; ++j) CHECK(xs[j] > 0);
}

TEST_CASE("zero rows are kept and flagged") {
  Builder b;
  b.row("r0", Relation::Eq, 0.0);
  int r = b.row("r1", Relation::Eq, 1.0);
  b.col("x1", 1.0);
  b.entry(r, 0, 1.0);
  auto [qp, map] = to_standard_form(b.p);
  CHECK(qp.m == 2);
  CHECK_FALSE(qp.warnings.empty());
}

TEST_CASE("explicitly stored zeros are pruned") {
  Builder b;
  int r = b.row("r1", Relation::Eq, 1.0);
  b.col("x1", 1.0);
  b.col("x2", 1.0);
  b.entry(r, 0, 1.0);
  b.entry(r, 1, 0.0);
  auto [qp, map] = to_standard_form(b.p);
  CHECK(qp.A.nonZeros() == 1);
}

TEST_CASE("upper-bound-only variables are flipped") {
  // x1 <= 3 free below, x2 >= 0, one equality row x1 + x2 = 1
  Builder b;
  int r = b.row("r1", Relation::Eq, 1.0);
  b.col("x1", 1.0, -kInf, 3.0);
  b.col("x2", 0.0);
  b.entry(r, 0, 1.0);
  b.entry(r, 1, 1.0);
  auto [qp, map] = to_standard_form(b.p);
  CHECK(map.flipped == 1);
  CHECK(map.vars[0].sign == -1.0);
  // witness x = (0.5, 0.5) maps to a standard-form feasible point
  Vec x0(2);
  x0 << 0.5, 0.5;
  Vec xs = std_witness(qp, map, x0);
  CHECK((qp.A * xs - qp.b).cwiseAbs().maxCoeff() <= 1e-12);
  Vec back = map.x_to_original(xs);
  CHECK(back[0] == doctest::Approx(0.5));
  CHECK(back[1] == doctest::Approx(0.5));
}

TEST_CASE("report mentions the transformation counts") {
  Builder b;
  int r = b.row("r1", Relation::Le, 2.0);
  b.col("x1", 1.0, 1.0, 3.0);
  b.entry(r, 0, 1.0);
  auto [qp, map] = to_standard_form(b.p);
  std::string rep = standardization_report(map);
  CHECK(rep.find("slack") != std::string::npos);
}

TEST_CASE("random problems round-trip feasibly with equal objectives") {
  std::mt19937 rng(20240817);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Vec x0;
    RawProblem p = random_raw(rng, x0);
    REQUIRE(p.feasibility_violation(x0) <= 1e-9);

    auto [qp, map] = to_standard_form(p);
    Vec xs = std_witness(qp, map, x0);

    // witness is standard-form feasible
    CHECK((qp.A * xs - qp.b).cwiseAbs().maxCoeff() <= 1e-8);
    for (Index j : qp.nonneg) CHECK(xs[j] >= -1e-9);

    // maps back to the original point and objective
    Vec back = map.x_to_original(xs);
    for (int j = 0; j < p.num_cols(); ++j)
      CHECK(back[j] == doctest::Approx(x0[j]).epsilon(1e-9));
    CHECK(p.feasibility_violation(back) <= 1e-7);
    CHECK(map.objective_to_original(qp.objective_at(xs)) ==
          doctest::Approx(p.objective_at(x0)).epsilon(1e-8));

    // index sets partition the columns
    std::vector<char> seen(qp.n, 0);
    for (Index j : qp.nonneg) seen[j] += 1;
    for (Index j : qp.free) seen[j] += 1;
    for (char sfl : seen) CHECK(sfl == 1);
    ++checked;
  }
  CHECK(checked == 60);
}
