#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ippmm/solver.hpp"

namespace ippmm {

struct BenchRecord {
  std::string problem;
  std::string config;  // "ippmm" or "noreg"
  std::string status;  // SolveStatus name, or "ParseError"/"ModelError"
  int iterations = 0;
  double time_s = 0;
  double res_p = 0, res_d = 0, mu = 0;
  double objective = 0;

  bool solved() const { return status == "Optimal"; }
  bool operator==(const BenchRecord&) const = default;
};

// Solves every *.qps / *.mps file under dir with the requested configs
// ("ippmm", "noreg" or both). Per-problem failures are recorded, never
// thrown. Records come back sorted by (problem, config).
std::vector<BenchRecord> run_suite(const std::string& dir,
                                   const std::vector<std::string>& configs,
                                   const SolverConfig& base = {});

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& recs);
std::vector<BenchRecord> read_records_csv(std::istream& in);

// Performance profile over a set of records: for each problem the best
// metric value among configs that solved it; a config's curve at ratio t is
// the fraction of problems it solved within t times the best. Unsolved
// problems never enter at any finite ratio.
struct ProfilePoint {
  double ratio;
  double fraction;
};
using PerfProfile = std::map<std::string, std::vector<ProfilePoint>>;

enum class ProfileMetric { Time, Iterations };

PerfProfile perf_profile(const std::vector<BenchRecord>& records,
                         ProfileMetric metric);

void write_profile_csv(std::ostream& out, const PerfProfile& profile);

}  // namespace ippmm
