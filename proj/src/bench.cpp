#include "ippmm/bench.hpp"

#include <algorithm>
#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>

#include "ippmm/mps.hpp"
#include "ippmm/standardize.hpp"

namespace ippmm {

namespace {

SolverConfig config_named(const std::string& name, const SolverConfig& base) {
  if (name == "noreg") {
    SolverConfig c = base;
    c.regularized = false;
    c.delta0 = c.rho0 = 0.0;
    c.pivot_threshold = -1;  // backend default when unregularized
    return c;
  }
  return base;
}

BenchRecord solve_one(const std::filesystem::path& path,
                      const std::string& config, const SolverConfig& base) {
  BenchRecord rec;
  rec.problem = path.stem().string();
  rec.config = config;
  try {
    RawProblem raw = parse_qps_file(path.string());
    auto [qp, map] = to_standard_form(raw);
    RowScaling sc = scale_rows(qp.A, qp.b);
    SolveResult r = solve(qp, config_named(config, base));
    rec.status = to_string(r.status);
    rec.iterations = r.iterations;
    rec.time_s = r.solve_seconds;
    rec.res_p = r.res_primal;
    rec.res_d = r.res_dual;
    rec.mu = r.mu;
    rec.objective = map_back(r, map, sc).objective;
  } catch (const ParseError&) {
    rec.status = "ParseError";
  } catch (const ModelError&) {
    rec.status = "ModelError";
  }
  return rec;
}

}  // namespace

std::vector<BenchRecord> run_suite(const std::string& dir,
                                   const std::vector<std::string>& configs,
                                   const SolverConfig& base) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto ext = e.path().extension().string();
    if (ext == ".qps" || ext == ".mps") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<BenchRecord> recs;
  for (const auto& f : files)
    for (const auto& cfg : configs) recs.push_back(solve_one(f, cfg, base));
  std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.problem, a.config) < std::tie(b.problem, b.config);
  });
  return recs;
}

void write_records_csv(std::ostream& out,
                       const std::vector<BenchRecord>& recs) {
  out << "problem,config,status,iterations,time_s,res_p,res_d,mu,objective\n";
  out.precision(17);
  for (const auto& r : recs)
    out << r.problem << ',' << r.config << ',' << r.status << ','
        << r.iterations << ',' << r.time_s << ',' << r.res_p << ','
        << r.res_d << ',' << r.mu << ',' << r.objective << '\n';
}

std::vector<BenchRecord> read_records_csv(std::istream& in) {
  std::vector<BenchRecord> recs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("problem,", 0) == 0) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<std::string> f;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 9)
      throw std::runtime_error("bad record line: " + line);
    BenchRecord r;
    r.problem = f[0];
    r.config = f[1];
    r.status = f[2];
    r.iterations = std::stoi(f[3]);
    r.time_s = std::stod(f[4]);
    r.res_p = std::stod(f[5]);
    r.res_d = std::stod(f[6]);
    r.mu = std::stod(f[7]);
    r.objective = std::stod(f[8]);
    recs.push_back(std::move(r));
  }
  return recs;
}

PerfProfile perf_profile(const std::vector<BenchRecord>& records,
                         ProfileMetric metric) {
  auto value = [&](const BenchRecord& r) {
    return metric == ProfileMetric::Time ? r.time_s
                                         : static_cast<double>(r.iterations);
  };

  std::vector<std::string> problems, configs;
  for (const auto& r : records) {
    problems.push_back(r.problem);
    configs.push_back(r.config);
  }
  auto uniq = [](std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(problems);
  uniq(configs);
  const double np = static_cast<double>(problems.size());

  std::map<std::string, double> best;  // per problem, over solved records
  for (const auto& r : records)
    if (r.solved()) {
      auto it = best.find(r.problem);
      double v = value(r);
      if (it == best.end() || v < it->second) best[r.problem] = v;
    }

  PerfProfile prof;
  for (const auto& cfg : configs) {
    std::vector<double> ratios;
    for (const auto& r : records) {
      if (r.config != cfg || !r.solved()) continue;
      double b = best.at(r.problem);
      ratios.push_back(std::max(value(r), 1e-12) / std::max(b, 1e-12));
    }
    std::sort(ratios.begin(), ratios.end());
    std::vector<ProfilePoint> curve;
    for (size_t i = 0; i < ratios.size(); ++i) {
      double frac = static_cast<double>(i + 1) / np;
      if (!curve.empty() && curve.back().ratio == ratios[i])
        curve.back().fraction = frac;  // step functions: keep the top of ties
      else
        curve.push_back({ratios[i], frac});
    }
    prof[cfg] = std::move(curve);
  }
  return prof;
}

void write_profile_csv(std::ostream& out, const PerfProfile& profile) {
  out << "config,ratio,fraction\n";
  out.precision(17);
  for (const auto& [cfg, curve] : profile)
    for (const auto& pt : curve)
      out << cfg << ',' << pt.ratio << ',' << pt.fraction << '\n';
}

}  // namespace ippmm
