#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "madesign/problem_io.hpp"
#include "madesign/suites.hpp"
#include "madesign/verification.hpp"

namespace {

using namespace madesign;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int thread_budget(int jobs) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("MADESIGN_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) cap = std::min(cap, requested);
  }
  return std::min(cap, std::max(1, jobs));
}

/// Run fn(0..jobs-1) on worker threads; results are merged by index, so the
/// output order is deterministic regardless of scheduling.
template <typename Fn>
void parallel_for(int jobs, Fn&& fn) {
  const int workers = thread_budget(jobs);
  if (workers <= 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    // Range spec a:b:step, inclusive of b up to rounding.
    double a = 0, b = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0) {
      throw ParseError("bad lambda range '" + text + "' (expected a:b:step)");
    }
    for (double v = a; v <= b + 1e-12; v += step) out.push_back(v);
  } else {
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ParseError("bad lambda value '" + item + "'");
      }
    }
  }
  if (out.empty()) throw ParseError("empty lambda list");
  return out;
}

struct CommonFlags {
  double lambda = 0.5;
  long max_iter = 100000;
  double gap_tol = 1e-8;
  double step_tol = 1e-12;
  std::string mode = "strict";
  std::string guard = "warn";
  bool deep_diagnostics = false;
  uint64_t seed = 0;
  std::string out;
  std::string w0_spec = "random";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--lambda", flags.lambda, "power parameter in (0,1]");
  cmd->add_option("--max-iter", flags.max_iter, "iteration cap");
  cmd->add_option("--gap-tol", flags.gap_tol, "duality-gap stopping tolerance");
  cmd->add_option("--step-tol", flags.step_tol, "L1 step stopping tolerance");
  cmd->add_option("--mode", flags.mode, "strict|generalized")
      ->check(CLI::IsMember({"strict", "generalized"}));
  cmd->add_option("--guard", flags.guard, "monotonicity guard: off|warn|fail")
      ->check(CLI::IsMember({"off", "warn", "fail"}));
  cmd->add_flag("--deep-diagnostics", flags.deep_diagnostics,
                "verify the monotonicity-proof inequalities per step");
  cmd->add_option("--seed", flags.seed, "random seed (random starts)");
  cmd->add_option("--out", flags.out, "output file (default: stdout)");
}

SolverConfig to_config(const CommonFlags& flags,
                       const std::optional<GeneralizedSpec>& spec) {
  SolverConfig cfg;
  cfg.lambda = flags.lambda;
  cfg.max_iter = flags.max_iter;
  cfg.gap_tol = flags.gap_tol;
  cfg.step_tol = flags.step_tol;
  cfg.mode = flags.mode == "generalized" ? SolverMode::Generalized : SolverMode::Strict;
  if (cfg.mode == SolverMode::Generalized) {
    if (!spec) throw ParseError("generalized mode needs a generalized_K in the problem file");
    cfg.generalized = *spec;
  }
  if (flags.guard == "off") cfg.guard = MonotonicityGuard::Off;
  if (flags.guard == "warn") cfg.guard = MonotonicityGuard::Warn;
  if (flags.guard == "fail") cfg.guard = MonotonicityGuard::Fail;
  cfg.deep_diagnostics = flags.deep_diagnostics;
  return cfg;
}

Weights parse_w0(const std::string& spec, int n, uint64_t seed) {
  if (spec == "uniform") return Weights::uniform(n);
  if (spec == "random") {
    std::mt19937_64 rng(seed);
    return random_interior_weights(n, rng);
  }
  std::vector<double> values;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  if (static_cast<int>(values.size()) != n) {
    throw ParseError("w0 needs " + std::to_string(n) + " entries");
  }
  Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
  return Weights(std::move(w));
}

int exit_code_for(const Verdict& verdict) {
  switch (verdict.kind) {
    case Verdict::Kind::Converged:
    case Verdict::Kind::DroppedAndReduced:
      return 0;
    case Verdict::Kind::MaxIter:
      return 2;
    case Verdict::Kind::Cycle:
      return 3;
    case Verdict::Kind::Breakdown:
      return 4;
  }
  return 1;
}

void print_warnings(const ProblemFile& pf) {
  for (const auto& w : pf.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_solve(const std::string& problem_path, const CommonFlags& flags) {
  const ProblemFile pf = ProblemFile::load(problem_path);
  print_warnings(pf);
  const DesignInstance inst = pf.instance();
  const Criterion crit = pf.criterion();
  const SolverConfig cfg = to_config(flags, pf.generalized());
  const Weights w0 = parse_w0(flags.w0_spec, inst.n(), flags.seed);

  const auto start = std::chrono::steady_clock::now();
  const RunResult result = run(inst, crit, w0, cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  TraceMeta meta;
  meta.problem = problem_path;
  meta.criterion = pf.criterion_spec;
  meta.config = cfg;
  meta.seed = flags.seed;
  meta.wall_seconds = wall;

  if (flags.out.empty()) {
    write_trace_csv(std::cout, result, meta);
  } else {
    std::ofstream out(flags.out);
    if (!out) throw Error("cannot write '" + flags.out + "'");
    write_trace_csv(out, result, meta);
  }

  std::cerr << "verdict: " << result.verdict.to_string() << "  iterations: "
            << result.trace.size() - 1 << "  f: " << num17(result.trace.back().f)
            << "\n";
  return exit_code_for(result.verdict);
}

int cmd_verify(const std::string& suite, int trials, uint64_t seed,
               const std::string& criteria_list, const std::string& lambda_sweep,
               int instances, long iters) {
  std::vector<Criterion> crits;
  {
    std::istringstream ss(criteria_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) crits.push_back(Criterion::parse(item));
    }
  }

  SuiteReport report;
  if (suite == "mcs") {
    report = suite_mcs(trials, seed);
  } else if (suite == "gradients") {
    report = suite_gradients(crits, trials, seed);
  } else if (suite == "monotonicity") {
    report = suite_monotonicity(crits, instances, iters, seed);
  } else if (suite == "rate") {
    report = suite_rate(parse_lambda_list(lambda_sweep), seed);
  } else if (suite == "examples") {
    report = suite_examples();
  } else {
    std::cerr << "unknown suite '" << suite
              << "' (known: mcs, gradients, monotonicity, rate, examples)\n";
    return 1;
  }

  std::cout << "suite " << report.name << ": passed " << report.passed << ", failed "
            << report.failed << "\n";
  for (const auto& f : report.failures) std::cout << "  FAIL " << f << "\n";
  return report.ok() ? 0 : 1;
}

int cmd_sweep(const std::string& problem_path, const std::string& lambdas_text,
              const CommonFlags& flags) {
  const ProblemFile pf = ProblemFile::load(problem_path);
  print_warnings(pf);
  const DesignInstance inst = pf.instance();
  const Criterion crit = pf.criterion();
  const std::vector<double> lambdas = parse_lambda_list(lambdas_text);

  std::vector<RunResult> results;
  results.reserve(lambdas.size());
  for (size_t i = 0; i < lambdas.size(); ++i) {
    // Pre-size with placeholders so workers can write by index.
    results.push_back(RunResult{{}, {}, Weights::uniform(inst.n()), {}, {}, {}});
  }
  const Weights w0 = parse_w0(flags.w0_spec, inst.n(), flags.seed);
  std::vector<std::string> errors(lambdas.size());
  parallel_for(static_cast<int>(lambdas.size()), [&](int i) {
    CommonFlags per = flags;
    per.lambda = lambdas[i];
    try {
      results[i] = run(inst, crit, w0, to_config(per, pf.generalized()));
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "lambda " << lambdas[i] << ": " << errors[i] << "\n";
      return 1;
    }
  }

  // The best final objective across the sweep stands in for f*.
  double f_star = -std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    if (std::isfinite(r.trace.back().f)) f_star = std::max(f_star, r.trace.back().f);
  }

  std::ostringstream csv;
  csv << "lambda,verdict,iters,final_gap,max_rate_ratio\n";
  for (size_t i = 0; i < lambdas.size(); ++i) {
    const RunResult& r = results[i];
    csv << num17(lambdas[i]) << "," << r.verdict.to_string() << ","
        << r.trace.size() - 1 << ",";
    if (r.trace.back().gap_bound) csv << num17(*r.trace.back().gap_bound);
    csv << ",";
    if (lambdas[i] > 0.0 && lambdas[i] < 1.0 && std::isfinite(f_star)) {
      const RateReport rate = linear_rate_check(r.trace, f_star, lambdas[i]);
      if (!rate.ratios.empty()) csv << num17(rate.max_ratio);
    }
    csv << "\n";
  }

  if (flags.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(flags.out);
    if (!out) throw Error("cannot write '" + flags.out + "'");
    out << csv.str();
  }
  return 0;
}

int cmd_openq(const std::string& problem_path, int starts, const CommonFlags& flags) {
  const ProblemFile pf = ProblemFile::load(problem_path);
  print_warnings(pf);
  if (!pf.generalized_K) {
    std::cerr << "openq needs a problem file with generalized_K\n";
    return 1;
  }
  const DesignInstance inst = pf.instance();
  const Criterion crit = pf.criterion();

  CommonFlags gen_flags = flags;
  gen_flags.mode = "generalized";
  const SolverConfig cfg = to_config(gen_flags, pf.generalized());

  std::vector<RunResult> results;
  for (int i = 0; i < starts; ++i) {
    results.push_back(RunResult{{}, {}, Weights::uniform(inst.n()), {}, {}, {}});
  }
  std::vector<std::string> errors(starts);
  parallel_for(starts, [&](int i) {
    std::mt19937_64 rng(flags.seed + static_cast<uint64_t>(i) * 0x9E3779B97F4A7C15ull);
    const Weights w0 = random_interior_weights(inst.n(), rng);
    try {
      results[i] = run(inst, crit, w0, cfg);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  int runs_ok = 0, drop_events = 0, feasible = 0, monotone = 0, converged = 0,
      certified = 0;
  std::ostringstream detail;
  for (int i = 0; i < starts; ++i) {
    if (!errors[i].empty()) {
      detail << "run " << i << ": error: " << errors[i] << "\n";
      continue;
    }
    const RunResult& r = results[i];
    ++runs_ok;
    const bool done = r.verdict.kind == Verdict::Kind::Converged ||
                      r.verdict.kind == Verdict::Kind::DroppedAndReduced;
    if (done) ++converged;
    if (done && r.final_residual && r.final_residual->certificate) ++certified;
    for (const auto& drop : r.drops) {
      ++drop_events;
      if (drop.feasible_after) ++feasible;
      const double scale =
          std::max(1.0, std::abs(r.trace[drop.k - 1].f));
      if (drop.objective_delta >= -1e-10 * scale) ++monotone;
      detail << "drop: run=" << i << " k=" << drop.k << " idx=[";
      for (size_t j = 0; j < drop.indices.size(); ++j) {
        if (j) detail << ",";
        detail << drop.indices[j];
      }
      detail << "] feasible=" << (drop.feasible_after ? 1 : 0)
             << " delta=" << num17(drop.objective_delta) << "\n";
    }
  }

  std::ostringstream report;
  report << "openq report: problem=" << problem_path << " starts=" << starts
         << " lambda=" << num17(flags.lambda) << " seed=" << flags.seed << "\n";
  report << "runs completed: " << runs_ok << "/" << starts << "\n";
  report << "runs converged: " << converged << "/" << runs_ok << "\n";
  report << "drop events: " << drop_events << "\n";
  report << "feasible after drop: " << feasible << "/" << drop_events << "\n";
  report << "monotone across drop: " << monotone << "/" << drop_events << "\n";
  report << "final certificate: " << certified << "/" << runs_ok << "\n";
  report << detail.str();

  if (flags.out.empty()) {
    std::cout << report.str();
  } else {
    std::ofstream out(flags.out);
    if (!out) throw Error("cannot write '" + flags.out + "'");
    out << report.str();
  }
  return runs_ok == starts ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiplicative-algorithm solver for optimal experimental design"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string solve_problem;
  CLI::App* solve = app.add_subcommand("solve", "run the solver on a problem file");
  solve->add_option("problem", solve_problem, "problem JSON file")->required();
  add_common_flags(solve, solve_flags);
  solve->add_option("--w0", solve_flags.w0_spec,
                    "starting point: random | uniform | v1,v2,... (seeded by --seed)");

  std::string verify_suite = "examples";
  int verify_trials = 1000;
  uint64_t verify_seed = 7;
  std::string verify_criteria = "D,A,pmean:0.5";
  std::string verify_sweep = "0.1:0.9:0.1";
  int verify_instances = 50;
  long verify_iters = 500;
  CLI::App* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", verify_suite,
                     "mcs | gradients | monotonicity | rate | examples")
      ->required();
  verify->add_option("--trials", verify_trials, "random trials");
  verify->add_option("--seed", verify_seed, "random seed");
  verify->add_option("--criteria", verify_criteria, "comma-separated criterion specs");
  verify->add_option("--lambda-sweep", verify_sweep, "a:b:step range for rate");
  verify->add_option("--instances", verify_instances, "instances per criterion");
  verify->add_option("--iters", verify_iters, "iterations per run");

  CommonFlags sweep_flags;
  std::string sweep_problem;
  std::string sweep_lambdas = "0.1:0.9:0.1";
  CLI::App* sweep = app.add_subcommand("sweep", "solve across a lambda grid");
  sweep->add_option("problem", sweep_problem, "problem JSON file")->required();
  sweep->add_option("--lambdas", sweep_lambdas, "comma list or a:b:step range");
  add_common_flags(sweep, sweep_flags);
  sweep->add_option("--w0", sweep_flags.w0_spec,
                    "starting point: random | uniform | v1,v2,... (seeded by --seed)");

  CommonFlags openq_flags;
  std::string openq_problem;
  int openq_starts = 100;
  CLI::App* openq = app.add_subcommand(
      "openq", "coordinate-dropping experiment over random starts");
  openq->add_option("problem", openq_problem, "problem JSON file")->required();
  openq->add_option("--starts", openq_starts, "number of random starting points");
  add_common_flags(openq, openq_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_problem, solve_flags);
    if (verify->parsed()) {
      return cmd_verify(verify_suite, verify_trials, verify_seed, verify_criteria,
                        verify_sweep, verify_instances, verify_iters);
    }
    if (sweep->parsed()) return cmd_sweep(sweep_problem, sweep_lambdas, sweep_flags);
    if (openq->parsed()) return cmd_openq(openq_problem, openq_starts, openq_flags);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
