#include "modcs/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modcs/errors.hpp"
#include "modcs/experiments.hpp"
#include "modcs/io.hpp"
#include "modcs/probability.hpp"
#include "modcs/snc.hpp"

namespace modcs::cli {

namespace {

using nlohmann::json;
namespace prob = modcs::probability;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw UsageError(what + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

// --seed when given, else MODCS_SEED.
std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("MODCS_SEED")) return parse_u64(env, "MODCS_SEED");
  throw UsageError("--seed is required (or set MODCS_SEED)");
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_u64(item, "index list"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

IndexSet make_index_set(std::size_t n, const std::string& text, const char* flag) {
  try {
    return IndexSet(n, parse_index_list(text));
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::vector<int> parse_signs(const std::string& text) {
  std::vector<int> out;
  for (char c : text) {
    if (c == '+') {
      out.push_back(1);
    } else if (c == '-') {
      out.push_back(-1);
    } else {
      throw UsageError("--signs may only contain '+' and '-'");
    }
  }
  return out;
}

json index_json(const IndexSet& s) { return s.members(); }

json count_json(const prob::BigInt& v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
  return v.str();
}

json estimate_json(const prob::ProbabilityEstimate& e) {
  json j = {{"value", e.value},
            {"method", prob::to_string(e.method)},
            {"recoverable_count", count_json(e.recoverable_count)},
            {"total_count", count_json(e.total_count)},
            {"checker", prob::to_string(e.checker)}};
  j["hoeffding_halfwidth"] = e.hoeffding_halfwidth ? json(*e.hoeffding_halfwidth) : json(nullptr);
  j["seed"] = e.seed ? json(*e.seed) : json(nullptr);
  return j;
}

struct GenMatrixArgs {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double lo = experiments::kMatrixLo;
  double hi = experiments::kMatrixHi;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string out;
};

struct CheckArgs {
  std::string matrix;
  std::string support;
  std::string known;
  std::string signs;
  CLI::Option* signs_opt = nullptr;
  std::string method = "snc";
  double tol = 0.0;
  CLI::Option* tol_opt = nullptr;
};

struct ProbArgs {
  std::string matrix;
  std::size_t ell = 0;
  std::size_t p = 0;
  std::size_t p1 = 0;
  std::string checker = "auto";
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::uint64_t cap = prob::kDefaultSpaceCap;
  double alpha = prob::kDefaultAlpha;
  std::string out;
};

struct ExperimentArgs {
  std::string figure;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string scale = "reduced";
  std::string out_dir = ".";
  std::uint64_t trials = 0;
  double budget = 0.0;
};

int cmd_gen_matrix(const GenMatrixArgs& a, std::ostream& out) {
  if (a.rows < 1 || a.cols < 1) throw UsageError("--rows and --cols must be at least 1");
  if (!(a.lo < a.hi)) throw UsageError("--lo must be below --hi");
  const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
  const std::string csv =
      io::matrix_to_csv(experiments::seeded_matrix(a.rows, a.cols, seed, a.lo, a.hi));
  if (a.out.empty() || a.out == "-") {
    out << csv;
  } else {
    io::write_file_atomic(a.out, csv);
  }
  return kOk;
}

int cmd_check(const CheckArgs& a, std::ostream& out) {
  const DenseMatrix m = io::read_matrix(a.matrix);
  const std::size_t n = m.cols();
  const IndexSet support = make_index_set(n, a.support, "--support");
  const IndexSet known = make_index_set(n, a.known, "--known");
  const IndexSet delta = support.set_difference(known);
  std::vector<int> signs = a.signs_opt->count() > 0 ? parse_signs(a.signs)
                                                     : std::vector<int>(delta.size(), 1);
  if (signs.size() != delta.size()) {
    throw UsageError("--signs has " + std::to_string(signs.size()) +
                     " entries but support minus known has " +
                     std::to_string(delta.size()) + " members");
  }
  const snc::SncInstance inst{m, known, delta, SignPattern(delta, std::move(signs))};

  json report;
  bool recoverable = false;
  if (a.method == "snc") {
    const double tol = a.tol_opt->count() > 0 ? a.tol : snc::kDefaultMarginTol;
    const snc::SncReport rep = snc::check_snc(inst, tol);
    recoverable = rep.recoverable;
    report = {{"recoverable", rep.recoverable},
              {"rank_ok", rep.rank_ok},
              {"subsets_checked", rep.subsets_checked},
              {"marginal", rep.marginal}};
    report["worst_margin"] = rep.worst_margin ? json(*rep.worst_margin) : json(nullptr);
    report["worst_subset"] = rep.worst_margin ? index_json(rep.worst_subset) : json(nullptr);
  } else {
    const double tol = a.tol_opt->count() > 0 ? a.tol : recovery::kDefaultRecoveryTol;
    const IndexSet known_true = known.set_intersection(support);
    recoverable = snc::check_by_solving(
        inst, known_true, RealVector(support.size(), 1.0), tol);
    report = {{"recoverable", recoverable},
              {"rank_ok", rank(columns(m, known)) == known.size()},
              {"worst_margin", nullptr},
              {"worst_subset", nullptr},
              {"subsets_checked", 0},
              {"marginal", false}};
  }
  out << report.dump(2) << '\n';
  return recoverable ? kOk : kNotRecoverable;
}

prob::Scenario scenario_for(const DenseMatrix& m, const ProbArgs& a) {
  const prob::Scenario s{m.cols(), a.ell, a.p, a.p1};
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return s;
}

void emit_estimate(const prob::ProbabilityEstimate& est, const ProbArgs& a,
                   std::ostream& out) {
  out << io::format_real(est.value) << '\n';
  if (!a.out.empty()) io::write_file_atomic(a.out, estimate_json(est).dump(2) + "\n");
}

prob::CheckerKind checker_for(const std::string& name) {
  try {
    return prob::parse_checker(name);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

int cmd_prob_exact(const ProbArgs& a, std::ostream& out) {
  const DenseMatrix m = io::read_matrix(a.matrix);
  const prob::Scenario s = scenario_for(m, a);
  emit_estimate(prob::exact_probability(m, s, checker_for(a.checker),
                                        snc::kDefaultMarginTol, a.cap),
                a, out);
  return kOk;
}

int cmd_prob_mc(const ProbArgs& a, std::ostream& out) {
  if (a.samples < 1) throw UsageError("--samples must be at least 1");
  if (!(a.alpha > 0 && a.alpha < 1)) throw UsageError("--alpha must lie in (0, 1)");
  const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
  const DenseMatrix m = io::read_matrix(a.matrix);
  const prob::Scenario s = scenario_for(m, a);
  emit_estimate(prob::mc_probability(m, s, a.samples, seed, checker_for(a.checker),
                                     snc::kDefaultMarginTol, a.alpha),
                a, out);
  return kOk;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  const std::uint64_t seed = resolve_seed(a.seed_opt, a.seed);
  experiments::Scale scale;
  try {
    scale = experiments::parse_scale(a.scale);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  experiments::ExperimentResult res;
  if (a.figure == "fig1") {
    experiments::ExperimentConfig cfg = experiments::example1_config(seed);
    if (a.trials > 0) cfg.empirical_trials = a.trials;
    res = experiments::run_example1(cfg, a.out_dir);
  } else {
    experiments::ExperimentConfig cfg = experiments::example2_config(seed, scale);
    if (a.budget > 0) cfg.case_budget = std::chrono::duration<double>(a.budget);
    res = experiments::run_example2(cfg, a.out_dir);
  }
  for (const auto& c : res.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
  }
  return res.all_passed() ? kOk : kToleranceFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact-recovery certificates and recovery probabilities for modified-CS"};
  app.name("modcs");
  app.require_subcommand(1);

  GenMatrixArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-matrix", "Write a seeded uniform random matrix as CSV");
  gen_cmd->add_option("--rows", gen.rows, "Number of rows")->required();
  gen_cmd->add_option("--cols", gen.cols, "Number of columns")->required();
  gen_cmd->add_option("--lo", gen.lo, "Lower end of the entry range")->capture_default_str();
  gen_cmd->add_option("--hi", gen.hi, "Upper end of the entry range")->capture_default_str();
  gen.seed_opt = gen_cmd->add_option("--seed", gen.seed, "Seed (falls back to MODCS_SEED)");
  gen_cmd->add_option("--out", gen.out, "Output file (default: standard output)");

  CheckArgs chk;
  auto* chk_cmd = app.add_subcommand("check", "Decide whether one signal pattern is recovered");
  chk_cmd->add_option("--matrix", chk.matrix, "Matrix CSV")->required();
  chk_cmd->add_option("--support", chk.support, "Support of x*, comma-separated 0-based")
      ->required();
  chk_cmd->add_option("--known", chk.known, "Known support T, comma-separated 0-based");
  chk.signs_opt = chk_cmd->add_option(
      "--signs", chk.signs, "'+'/'-' per member of support minus known (default all '+')");
  chk_cmd->add_option("--method", chk.method, "snc or solve")
      ->check(CLI::IsMember({"snc", "solve"}))
      ->capture_default_str();
  chk.tol_opt = chk_cmd->add_option(
      "--tol", chk.tol, "Margin tolerance (snc) or recovery tolerance (solve)");

  ProbArgs pe;
  auto* pe_cmd = app.add_subcommand("prob-exact", "Recovery probability by enumerating all quads");
  ProbArgs pm;
  auto* pm_cmd = app.add_subcommand("prob-mc", "Recovery probability by Monte Carlo sampling");
  for (auto [cmd, args] : {std::pair{pe_cmd, &pe}, std::pair{pm_cmd, &pm}}) {
    cmd->add_option("--matrix", args->matrix, "Matrix CSV")->required();
    cmd->add_option("--ell", args->ell, "Sparsity")->required();
    cmd->add_option("--p", args->p, "Size of the known support")->required();
    cmd->add_option("--p1", args->p1, "Wrong entries in the known support")->required();
    cmd->add_option("--checker", args->checker, "auto, snc or solve")->capture_default_str();
    cmd->add_option("--out", args->out, "Write the estimate as JSON here");
  }
  pe_cmd->add_option("--cap", pe.cap, "Largest quad space to enumerate")->capture_default_str();
  pm_cmd->add_option("--samples", pm.samples, "Number of draws M")->required();
  pm.seed_opt = pm_cmd->add_option("--seed", pm.seed, "Seed (falls back to MODCS_SEED)");
  pm_cmd->add_option("--alpha", pm.alpha, "Hoeffding confidence level")->capture_default_str();

  ExperimentArgs ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Reproduce a recovery-probability study");
  ex_cmd->add_option("figure", ex.figure, "fig1 or fig2")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2"}));
  ex.seed_opt = ex_cmd->add_option("--seed", ex.seed, "Seed (falls back to MODCS_SEED)");
  ex_cmd->add_option("--scale", ex.scale, "reduced or full (fig2)")->capture_default_str();
  ex_cmd->add_option("--out-dir", ex.out_dir, "Output directory")->capture_default_str();
  ex_cmd->add_option("--trials", ex.trials, "Random signals per point (fig1, default 1000)");
  ex_cmd->add_option("--budget", ex.budget, "Wall-clock seconds per case (fig2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_matrix(gen, out);
    if (*chk_cmd) return cmd_check(chk, out);
    if (*pe_cmd) return cmd_prob_exact(pe, out);
    if (*pm_cmd) return cmd_prob_mc(pm, out);
    return cmd_experiment(ex, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (...) {
    err << "error: unknown failure\n";
    return kFailure;
  }
}

}  // namespace modcs::cli
