#include "modcs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include <json.hpp>

#include "modcs/errors.hpp"
#include "modcs/io.hpp"

namespace modcs::experiments {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

constexpr double kFitTol = 0.05;
constexpr double kSpreadTol = 0.1;
constexpr double kMcExactTol = 0.03;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string optional_real(const std::optional<double>& v) {
  return v ? io::format_real(*v) : std::string();
}

json scenario_json(const Scenario& s) {
  return {{"n", s.n}, {"ell", s.ell}, {"p", s.p}, {"p1", s.p1}};
}

json config_json(const ExperimentConfig& cfg) {
  json cases = json::array();
  for (const MatrixCase& c : cfg.cases) {
    json scenarios = json::array();
    for (const Scenario& s : c.scenarios) scenarios.push_back(scenario_json(s));
    cases.push_back({{"m", c.m},
                     {"n", c.n},
                     {"checker", probability::to_string(c.checker)},
                     {"scenarios", scenarios},
                     {"sample_grid", c.sample_grid}});
  }
  json out = {{"seed", cfg.seed},
              {"scale", to_string(cfg.scale)},
              {"empirical_trials", cfg.empirical_trials},
              {"mc_sample_grid", cfg.mc_sample_grid},
              {"cases", cases}};
  out["case_budget_seconds"] =
      cfg.case_budget ? json(cfg.case_budget->count()) : json(nullptr);
  return out;
}

json point_json(const CurvePoint& p) {
  json j = {{"case_m", p.case_m}, {"case_n", p.case_n},
            {"ell", p.scenario.ell}, {"p", p.scenario.p},
            {"p1", p.scenario.p1}, {"samples_used", p.samples_used},
            {"seed", p.seed}, {"checker", probability::to_string(p.checker)},
            {"status", p.status}, {"seconds", p.seconds}};
  auto put = [&j](const char* name, const std::optional<double>& v) {
    j[name] = v ? json(*v) : json(nullptr);
  };
  put("theoretical", p.theoretical);
  put("empirical", p.empirical);
  put("mc_value", p.mc_value);
  put("hoeffding_halfwidth", p.hoeffding_halfwidth);
  return j;
}

void write_summary(const std::filesystem::path& out_dir, const char* name,
                   const ExperimentConfig& cfg, const ExperimentResult& res,
                   double total_seconds) {
  json points = json::array();
  for (const CurvePoint& p : res.points) points.push_back(point_json(p));
  json checks = json::array();
  for (const ToleranceCheck& c : res.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  const json doc = {
      {"experiment", name},
      {"config", config_json(cfg)},
      {"points", points},
      {"checks", checks},
      {"all_passed", res.all_passed()},
      {"total_seconds", total_seconds},
      {"note", "tolerance thresholds are chosen quantifications of qualitative "
               "agreement, not published values"}};
  io::write_file_atomic(out_dir / "summary.json", doc.dump(2) + "\n");
}

std::string fig1_csv(const std::vector<CurvePoint>& points, std::uint64_t trials,
                     std::uint64_t seed) {
  std::string out = "ell,p,p1,theoretical,empirical,trials,seed\n";
  for (const CurvePoint& p : points) {
    out += std::to_string(p.scenario.ell) + ',' + std::to_string(p.scenario.p) + ',' +
           std::to_string(p.scenario.p1) + ',' + optional_real(p.theoretical) + ',' +
           optional_real(p.empirical) + ',' + std::to_string(trials) + ',' +
           std::to_string(seed) + '\n';
  }
  return out;
}

std::string fig2_csv(const std::vector<CurvePoint>& points) {
  std::string out =
      "case_m,case_n,ell,p,p1,M,estimate,hoeffding_halfwidth,seed,checker,status\n";
  for (const CurvePoint& p : points) {
    out += std::to_string(p.case_m) + ',' + std::to_string(p.case_n) + ',' +
           std::to_string(p.scenario.ell) + ',' + std::to_string(p.scenario.p) + ',' +
           std::to_string(p.scenario.p1) + ',' + std::to_string(p.samples_used) + ',' +
           optional_real(p.mc_value) + ',' + optional_real(p.hoeffding_halfwidth) + ',' +
           std::to_string(p.seed) + ',' + probability::to_string(p.checker) + ',' +
           p.status + '\n';
  }
  return out;
}

bool in_unit_interval(const std::optional<double>& v) {
  return !v || (*v >= 0.0 && *v <= 1.0);
}

ToleranceCheck unit_interval_check(const std::vector<CurvePoint>& points) {
  const bool ok = std::all_of(points.begin(), points.end(), [](const CurvePoint& p) {
    return in_unit_interval(p.theoretical) && in_unit_interval(p.empirical) &&
           in_unit_interval(p.mc_value);
  });
  return {"values_in_unit_interval", ok, ""};
}

void prepare_dir(const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }
}

}  // namespace

const char* to_string(Scale s) noexcept {
  return s == Scale::Full ? "full" : "reduced";
}

Scale parse_scale(const std::string& name) {
  if (name == "reduced") return Scale::Reduced;
  if (name == "full") return Scale::Full;
  throw InvalidArgument("unknown scale '" + name + "' (expected reduced or full)");
}

bool ExperimentResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ToleranceCheck& c) { return c.passed; });
}

void ExperimentConfig::validate() const {
  if (cases.empty()) throw InvalidArgument("experiment has no matrix cases");
  if (empirical_trials < 1) throw InvalidArgument("empirical_trials must be >= 1");
  for (const MatrixCase& c : cases) {
    if (c.m < 1 || c.n < 1) throw InvalidArgument("matrix case has an empty dimension");
    if (c.scenarios.empty()) throw InvalidArgument("matrix case has no scenarios");
    for (const Scenario& s : c.scenarios) {
      s.validate();
      if (s.n != c.n) throw DimensionMismatch("scenario n differs from matrix columns");
    }
    for (std::uint64_t m : c.sample_grid) {
      if (m < 1) throw InvalidArgument("sample counts must be >= 1");
    }
  }
  for (std::uint64_t m : mc_sample_grid) {
    if (m < 1) throw InvalidArgument("sample counts must be >= 1");
  }
  if (case_budget && !(case_budget->count() > 0)) {
    throw InvalidArgument("case budget must be positive");
  }
}

ExperimentConfig example1_config(std::uint64_t seed) {
  MatrixCase c{7, 9, {}, CheckerKind::Auto, {}};
  for (std::size_t ell = 2; ell <= 7; ++ell) {
    for (std::size_t p1 = 0; p1 <= 2; ++p1) c.scenarios.push_back({9, ell, 2, p1});
  }
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.cases = {c};
  cfg.scale = Scale::Full;
  return cfg;
}

ExperimentConfig example2_config(std::uint64_t seed, Scale scale) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.scale = scale;
  cfg.cases = {
      {7, 9, {{9, 4, 2, 1}}, CheckerKind::Auto, {}},
      {52, 128, {{128, 20, 8, 3}}, CheckerKind::DirectSolve, {}},
      {181, 1280, {{1280, 60, 32, 4}}, CheckerKind::DirectSolve, {}},
  };
  if (scale == Scale::Full) {
    cfg.mc_sample_grid = {100, 500, 1000, 5000, 10000};
  } else {
    cfg.mc_sample_grid = {100, 500, 1000};
    cfg.cases[2].sample_grid = {100};
  }
  return cfg;
}

DenseMatrix gen_uniform_matrix(std::size_t m, std::size_t n, double lo, double hi,
                               SeededStream& rng) {
  if (m < 1 || n < 1) throw InvalidArgument("matrix dimensions must be positive");
  if (!(lo < hi)) throw InvalidArgument("need lo < hi");
  std::vector<double> entries(m * n);
  for (double& v : entries) v = rng.uniform(lo, hi);
  return DenseMatrix(m, n, std::move(entries));
}

DenseMatrix seeded_matrix(std::size_t m, std::size_t n, std::uint64_t seed, double lo,
                          double hi) {
  SeededStream rng = SeededStream(seed).substream(stream_tag::kMatrix);
  return gen_uniform_matrix(m, n, lo, hi, rng);
}

double empirical_recovery_rate(const DenseMatrix& a, const Scenario& s,
                               std::uint64_t trials, const SeededStream& rng,
                               double tol) {
  s.validate();
  if (a.cols() != s.n) throw DimensionMismatch("matrix columns differ from scenario n");
  if (trials < 1) throw InvalidArgument("trials must be >= 1");

  std::uint64_t hits = 0;
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(trials);

#pragma omp parallel for schedule(dynamic, 8) reduction(+ : hits)
  for (std::int64_t t = 0; t < count; ++t) {
    try {
      SeededStream draw = rng.substream(static_cast<std::uint64_t>(t));
      const probability::Quad q = probability::sample_quad(s, draw);
      RealVector x(s.n, 0.0);
      for (std::size_t i = 0; i < q.delta().size(); ++i) {
        x[q.delta()[i]] = q.pattern.sign_at(i) * draw.uniform(kDeadZone, 1.0);
      }
      for (std::size_t k : q.known_true) x[k] = draw.sign() * draw.uniform(kDeadZone, 1.0);
      const RealVector y = mat_vec(a, x);
      const RealVector xhat = recovery::solve_modified_cs({a, y, q.known()});
      if (recovery::recovered(xhat, x, tol)) ++hits;
    } catch (...) {
#pragma omp critical(modcs_empirical_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return static_cast<double>(hits) / static_cast<double>(trials);
}

ExperimentResult run_example1(const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
  cfg.validate();
  prepare_dir(out_dir);
  const auto t0 = Clock::now();
  const MatrixCase& c = cfg.cases.front();
  const DenseMatrix a = seeded_matrix(c.m, c.n, cfg.seed);
  const SeededStream empirical = SeededStream(cfg.seed).substream(stream_tag::kEmpirical);

  ExperimentResult res;
  for (std::size_t i = 0; i < c.scenarios.size(); ++i) {
    const Scenario& s = c.scenarios[i];
    const auto tp = Clock::now();
    const auto exact = probability::exact_probability(a, s, c.checker);
    CurvePoint p;
    p.case_m = c.m;
    p.case_n = c.n;
    p.scenario = s;
    p.theoretical = exact.value;
    p.empirical = empirical_recovery_rate(a, s, cfg.empirical_trials, empirical.substream(i));
    p.samples_used = cfg.empirical_trials;
    p.seed = cfg.seed;
    p.checker = exact.checker;
    p.seconds = seconds_since(tp);
    res.points.push_back(p);
    io::write_file_atomic(out_dir / "fig1.csv",
                          fig1_csv(res.points, cfg.empirical_trials, cfg.seed));
  }

  double worst = 0.0;
  std::string worst_at;
  for (const CurvePoint& p : res.points) {
    const double d = std::abs(*p.theoretical - *p.empirical);
    if (d >= worst) {
      worst = d;
      worst_at = "ell=" + std::to_string(p.scenario.ell) + " p1=" + std::to_string(p.scenario.p1);
    }
  }
  res.checks.push_back({"theoretical_vs_empirical_within_0.05", worst <= kFitTol,
                        "largest deviation " + io::format_real(worst) + " at " + worst_at});

  // P(p1=0) >= P(p1=1) - 0.01 >= P(p1=2) - 0.02 for every ell.
  std::map<std::size_t, std::map<std::size_t, double>> by_ell;
  for (const CurvePoint& p : res.points) by_ell[p.scenario.ell][p.scenario.p1] = *p.theoretical;
  bool ordered = true;
  std::string broken;
  for (const auto& [ell, row] : by_ell) {
    if (row.size() != 3) continue;
    const bool ok = row.at(0) >= row.at(1) - 0.01 && row.at(1) - 0.01 >= row.at(2) - 0.02;
    if (!ok) {
      ordered = false;
      broken += (broken.empty() ? "violated at ell=" : ",") + std::to_string(ell);
    }
  }
  res.checks.push_back({"ordering_by_p1", ordered, broken});
  res.checks.push_back(unit_interval_check(res.points));

  write_summary(out_dir, "fig1", cfg, res, seconds_since(t0));
  return res;
}

ExperimentResult run_example2(const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
  cfg.validate();
  prepare_dir(out_dir);
  const auto t0 = Clock::now();
  ExperimentResult res;
  bool all_completed = true;

  for (std::size_t ci = 0; ci < cfg.cases.size(); ++ci) {
    const MatrixCase& c = cfg.cases[ci];
    const std::vector<std::uint64_t>& grid =
        c.sample_grid.empty() ? cfg.mc_sample_grid : c.sample_grid;
    if (grid.empty()) throw InvalidArgument("no Monte Carlo sample grid");
    const std::uint64_t case_seed = cfg.seed + ci;
    const DenseMatrix a = seeded_matrix(c.m, c.n, case_seed);

    for (const Scenario& s : c.scenarios) {
      const CheckerKind kind = probability::resolve(c.checker, s);
      const std::uint64_t max_m = *std::max_element(grid.begin(), grid.end());
      const auto tc = Clock::now();
      probability::Deadline deadline;
      if (cfg.case_budget) {
        deadline = tc + std::chrono::duration_cast<Clock::duration>(*cfg.case_budget);
      }
      std::vector<std::uint8_t> outcomes;
      std::string status = "ok";
      try {
        outcomes = probability::mc_outcomes(a, s, max_m, case_seed, kind,
                                            snc::kDefaultMarginTol, deadline);
      } catch (const BudgetExceeded&) {
        status = "budget_exceeded";
        all_completed = false;
      }
      const double elapsed = seconds_since(tc);

      std::vector<double> estimates;
      for (std::uint64_t m : grid) {
        CurvePoint p;
        p.case_m = c.m;
        p.case_n = c.n;
        p.scenario = s;
        p.samples_used = m;
        p.seed = case_seed;
        p.checker = kind;
        p.status = status;
        p.seconds = elapsed;
        if (status == "ok") {
          const auto est = probability::summarize_outcomes(outcomes, m, case_seed, kind);
          p.mc_value = est.value;
          p.hoeffding_halfwidth = est.hoeffding_halfwidth;
          estimates.push_back(est.value);
        }
        res.points.push_back(p);
      }
      io::write_file_atomic(out_dir / "fig2.csv", fig2_csv(res.points));

      // The smallest case is also checked against the exact engine.
      if (ci == 0 && status == "ok") {
        const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
        res.checks.push_back({"case1_spread_within_0.1", *hi - *lo <= kSpreadTol,
                              "spread " + io::format_real(*hi - *lo)});
        const double exact = probability::exact_probability(a, s, c.checker).value;
        const double tol = std::max(kMcExactTol, probability::hoeffding_halfwidth(max_m));
        const double at_max =
            probability::summarize_outcomes(outcomes, max_m, case_seed, kind).value;
        const double gap = std::abs(at_max - exact);
        res.checks.push_back({"case1_mc_vs_exact", gap <= tol,
                              "exact " + io::format_real(exact) + ", gap " +
                                  io::format_real(gap) + " at M=" + std::to_string(max_m) +
                                  ", tolerance " + io::format_real(tol)});
      }
    }
  }
  res.checks.push_back({"cases_completed", all_completed, ""});
  res.checks.push_back(unit_interval_check(res.points));
  write_summary(out_dir, "fig2", cfg, res, seconds_since(t0));
  return res;
}

}  // namespace modcs::experiments
