#pragma once

#include <optional>
#include <string>
#include <vector>

#include "madesign/problem.hpp"

namespace madesign {

enum class SolverMode { Strict, Generalized };
enum class MonotonicityGuard { Off, Warn, Fail };

/// Weight below this absolute threshold is flushed to exact zero after a
/// multiplicative step (denormal weights would mask genuine support loss).
inline constexpr double kSupportDropTol = 1e-15;

/// L1 distance under which two iterates count as equal for cycle detection.
inline constexpr double kCycleTol = 1e-12;

/// Relative tolerance of the monotonicity guard.
inline constexpr double kMonotonicityTol = 1e-10;

struct SolverConfig {
  double lambda = 0.5;           // power parameter, in (0, 1]
  long max_iter = 100000;
  double gap_tol = 1e-8;         // duality-gap stopping (D/A/p-mean)
  double step_tol = 1e-12;       // L1 step stopping (always active)
  SolverMode mode = SolverMode::Strict;
  std::optional<GeneralizedSpec> generalized;  // required in Generalized mode
  MonotonicityGuard guard = MonotonicityGuard::Warn;
  bool deep_diagnostics = false;
  int cycle_window = 8;          // < 2 disables cycle detection
};

struct Event {
  enum class Kind {
    SupportShrunk,          // index: 1-based coordinate that hit exact zero
    NonPositiveGradient,    // index: support coordinate with grad <= 0
    CycleDetected,          // period
    MonotonicityViolation,  // delta = f(w^k) - f(w^{k-1}) < 0
    MtildeCheckFailed,      // a monotonicity-proof inequality failed numerically
  };
  Kind kind;
  int index = 0;
  int period = 0;
  double delta = 0.0;

  std::string to_string() const;
};

struct IterationRecord {
  long k = 0;
  Weights w;                              // original coordinates
  double f = 0.0;                         // may be -infinity
  std::optional<Eigen::VectorXd> grad;    // absent exactly when f = -infinity
  std::optional<double> gap_bound;
  double step_l1 = 0.0;                   // ||w^k - w^{k-1}||_1, 0 at k = 0
  std::vector<Event> events;
};

/// Numerical witnesses for the three inequalities in the monotonicity proof,
/// evaluated on one multiplicative step.
struct StepDiagnostics {
  double gamma = 0.0;             // sum_i w_i grad_i^lambda over the support
  double loewner_min_eig = 0.0;   // lambda_min(Mtilde - M (M^+)^{-1} M)
  double loewner_max_eig = 0.0;   // lambda_max of the same difference
  bool loewner_ok = false;        // M (M^+)^{-1} M <= Mtilde
  double holder_lhs = 0.0;        // <grad phi(M), Mtilde>
  double holder_rhs = 0.0;        // <grad phi(M), M>
  bool holder_ok = false;
  double f_before = 0.0;
  double f_after = 0.0;
  bool objective_ok = false;      // f(w+) >= f(w)

  bool all_ok() const { return loewner_ok && holder_ok && objective_ok; }
};

/// One coordinate-dropping event of the generalized mode, with the
/// empirical answers to the three open questions attached.
struct DropRecord {
  long k = 0;                  // iteration at which the reduced iterate appears
  std::vector<int> indices;    // 1-based original coordinates dropped here
  bool feasible_after = false; // M(w^k) still in F(K)?
  double objective_delta = 0.0;  // f(w^k) - f(w^{k-1}) across the drop
};

struct Verdict {
  enum class Kind { Converged, MaxIter, Cycle, Breakdown, DroppedAndReduced };
  Kind kind = Kind::MaxIter;
  int cycle_period = 0;
  std::string reason;           // Breakdown only
  std::vector<int> dropped;     // DroppedAndReduced: 1-based original indices

  std::string to_string() const;
};

struct RunResult {
  std::vector<IterationRecord> trace;
  Verdict verdict;
  Weights final_w;
  std::vector<DropRecord> drops;
  std::optional<OptimalityResidual> final_residual;  // at the last iterate, tol 1e-6
  std::vector<std::pair<long, StepDiagnostics>> deep;  // per step k, when enabled
};

/// One multiplicative update w_i <- w_i * grad_i^lambda, renormalized.
/// Zero gradients on the support produce exact zero weights (0^lambda = 0);
/// weights below kSupportDropTol flush to exact zero. Throws
/// NegativeGradient if grad_i < 0 on the support, DegenerateStep if every
/// candidate weight vanishes.
Weights ma_step(const Weights& w, const Eigen::VectorXd& grad, double lambda);

/// Algorithm: at each iterate compute the gradient, take the multiplicative
/// step, stop on duality gap, step size, cycle, breakdown or max_iter.
/// Strict mode requires w0 in the relative interior with M(w0) positive
/// definite and reports Breakdown when an iterate leaves the differentiable
/// region. Generalized mode drops exact-zero coordinates, continues on the
/// reduced problem and records the feasibility/monotonicity/convergence
/// observables per drop.
RunResult run(const DesignInstance& inst, const Criterion& crit,
              const Weights& w0, const SolverConfig& cfg);

/// Evaluate the monotonicity-proof inequality chain on a single step from w.
/// Requires M(w) positive definite and positive support gradients.
StepDiagnostics deep_step_diagnostics(const DesignInstance& inst,
                                      const Criterion& crit, const Weights& w,
                                      double lambda, double tol = 1e-9);

/// Smallest period p <= window such that ||w^j - w^{j-p}||_1 <= kCycleTol
/// held for the last 2p iterations of the trace; nullopt if none.
std::optional<int> detect_cycle(const std::vector<IterationRecord>& trace,
                                int window);

}  // namespace madesign
