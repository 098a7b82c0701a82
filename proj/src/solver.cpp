#include "madesign/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace madesign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string Event::to_string() const {
  switch (kind) {
    case Kind::SupportShrunk:
      return "SupportShrunk(" + std::to_string(index) + ")";
    case Kind::NonPositiveGradient:
      return "NonPositiveGradient(" + std::to_string(index) + ")";
    case Kind::CycleDetected:
      return "CycleDetected(" + std::to_string(period) + ")";
    case Kind::MonotonicityViolation:
      return "MonotonicityViolation(" + format_short(delta) + ")";
    case Kind::MtildeCheckFailed:
      return "MtildeCheckFailed";
  }
  return "?";
}

std::string Verdict::to_string() const {
  switch (kind) {
    case Kind::Converged:
      return "Converged";
    case Kind::MaxIter:
      return "MaxIter";
    case Kind::Cycle:
      return "Cycle(" + std::to_string(cycle_period) + ")";
    case Kind::Breakdown:
      return "Breakdown(" + reason + ")";
    case Kind::DroppedAndReduced: {
      std::string out = "DroppedAndReduced([";
      for (size_t i = 0; i < dropped.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(dropped[i]);
      }
      return out + "])";
    }
  }
  return "?";
}

Weights ma_step(const Weights& w, const Eigen::VectorXd& grad, double lambda) {
  if (grad.size() != w.n()) throw DimensionMismatch("ma_step: gradient size mismatch");
  if (!(lambda > 0.0) || lambda > 1.0) throw DomainError("ma_step: lambda must be in (0,1]");
  Eigen::VectorXd bar(w.n());
  for (int i = 0; i < w.n(); ++i) {
    if (w[i] == 0.0) {
      bar[i] = 0.0;
      continue;
    }
    const double g = grad[i];
    if (g < 0.0) {
      throw NegativeGradient("ma_step: negative gradient " + format_short(g) +
                             " on support coordinate " + std::to_string(i + 1));
    }
    bar[i] = w[i] * std::pow(g, lambda);  // 0^lambda = 0 exactly
  }
  const double sum = bar.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw DegenerateStep("ma_step: every candidate weight vanished or overflowed");
  }
  bar /= sum;
  for (int i = 0; i < w.n(); ++i) {
    if (bar[i] != 0.0 && bar[i] < kSupportDropTol) bar[i] = 0.0;
  }
  return Weights(std::move(bar));
}

std::optional<int> detect_cycle(const std::vector<IterationRecord>& trace, int window) {
  if (window < 2 || trace.empty()) return std::nullopt;
  const long k = static_cast<long>(trace.size()) - 1;
  for (int p = 1; p <= window; ++p) {
    if (k - 2 * p + 1 < p) continue;  // need 2p comparisons, each reaching back p
    bool sustained = true;
    for (long j = k - 2 * p + 1; j <= k; ++j) {
      const double dist =
          (trace[j].w.vec() - trace[j - p].w.vec()).lpNorm<1>();
      if (dist > kCycleTol) {
        sustained = false;
        break;
      }
    }
    if (sustained) return p;
  }
  return std::nullopt;
}

StepDiagnostics deep_step_diagnostics(const DesignInstance& inst,
                                      const Criterion& crit, const Weights& w,
                                      double lambda, double tol) {
  const Eigen::VectorXd grad = gradient(inst, crit, w);
  for (int i : w.support()) {
    if (!(grad[i] > 0.0)) {
      throw Error("deep_step_diagnostics: gradient not positive on the support");
    }
  }
  const SymMatrix m = moment_matrix(inst, w);
  const SymMatrix grad_m = grad_phi(crit, m);

  StepDiagnostics diag;
  double gamma = 0.0;
  Eigen::MatrixXd tilde_acc = Eigen::MatrixXd::Zero(inst.d(), inst.d());
  for (int i : w.support()) {
    const double glam = std::pow(grad[i], lambda);
    gamma += w[i] * glam;
    tilde_acc += (w[i] / glam) * inst.matrix(i).mat();
  }
  diag.gamma = gamma;
  const SymMatrix m_tilde(gamma * tilde_acc);

  const Weights w_next = ma_step(w, grad, lambda);
  const SymMatrix m_next = moment_matrix(inst, w_next);
  const SymMatrix q(m.mat() * inverse_pd(m_next).mat() * m.mat());

  const auto sd = spectral_decompose(m_tilde - q);
  diag.loewner_min_eig = sd.eigenvalues[sd.eigenvalues.size() - 1];
  diag.loewner_max_eig = sd.eigenvalues[0];
  diag.loewner_ok =
      diag.loewner_min_eig >= -tol * std::max(1.0, diag.loewner_max_eig);

  diag.holder_lhs = inner(grad_m, m_tilde);
  diag.holder_rhs = inner(grad_m, m);
  diag.holder_ok = diag.holder_lhs <= diag.holder_rhs +
                                          tol * std::max(1.0, std::abs(diag.holder_rhs));

  diag.f_before = eval_phi(crit, m);
  diag.f_after = eval_phi(crit, m_next);
  diag.objective_ok =
      diag.f_after >= diag.f_before - tol * std::max(1.0, std::abs(diag.f_before));
  return diag;
}

namespace {

struct Evaluation {
  double f = kNegInf;
  std::optional<Eigen::VectorXd> grad;
  std::optional<double> gap;
  bool feasible = true;
  std::string failure;  // reason when grad is absent
};

Evaluation evaluate(const DesignInstance& inst, const Criterion& crit,
                    const Weights& w, const SolverConfig& cfg) {
  Evaluation ev;
  if (cfg.mode == SolverMode::Strict) {
    ev.f = objective(inst, crit, w);
    try {
      ev.grad = gradient(inst, crit, w);
    } catch (const NonDifferentiablePoint&) {
      ev.failure = "moment matrix not positive definite; f = -inf";
      return ev;
    }
  } else {
    const GeneralizedSpec& spec = *cfg.generalized;
    ev.feasible = feasibility_cone_member(inst, w, spec);
    if (!ev.feasible) {
      ev.failure = "moment matrix left the feasibility cone";
      return ev;
    }
    ev.f = generalized_objective(inst, crit, w, spec);
    try {
      ev.grad = generalized_gradient(inst, crit, w, spec);
    } catch (const Error&) {
      ev.failure = "generalized gradient unavailable";
      return ev;
    }
  }
  if (ev.grad && crit.gap_bound_available() && std::isfinite(ev.f)) {
    ev.gap = gap_from_gradient(w, *ev.grad);
  }
  return ev;
}

Eigen::VectorXd expand(int n, const std::vector<int>& active,
                       const Eigen::VectorXd& reduced) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
  for (size_t j = 0; j < active.size(); ++j) full[active[j]] = reduced[j];
  return full;
}

}  // namespace

RunResult run(const DesignInstance& inst, const Criterion& crit,
              const Weights& w0, const SolverConfig& cfg) {
  if (!(cfg.lambda > 0.0) || cfg.lambda > 1.0) {
    throw DomainError("run: lambda must be in (0,1]");
  }
  if (!(cfg.gap_tol > 0.0) || !(cfg.step_tol > 0.0) || cfg.max_iter < 1) {
    throw DomainError("run: gap_tol and step_tol must be positive, max_iter >= 1");
  }
  if (w0.n() != inst.n()) throw StartPointError("run: w0 has wrong length");

  const bool generalized = cfg.mode == SolverMode::Generalized;
  if (generalized) {
    if (!cfg.generalized) throw StartPointError("run: generalized mode needs a K spec");
    if (cfg.generalized->d() != inst.d()) {
      throw StartPointError("run: K row count does not match the instance dimension");
    }
    if (!feasibility_cone_member(inst, w0, *cfg.generalized)) {
      throw StartPointError("run: M(w0) is outside the feasibility cone");
    }
  } else {
    if (!w0.interior()) {
      throw StartPointError("run: strict mode requires w0 in the relative interior");
    }
    if (!is_pd(moment_matrix(inst, w0))) {
      throw StartPointError("run: M(w0) is not positive definite");
    }
  }

  // Iteration state: active original coordinates plus their weights. Strict
  // mode never compacts; generalized mode drops exact zeros from `active`.
  std::vector<int> active;
  for (int i : w0.support()) active.push_back(i);
  if (!generalized) {
    active.clear();
    for (int i = 0; i < inst.n(); ++i) active.push_back(i);
  }
  Eigen::VectorXd w_active(active.size());
  for (size_t j = 0; j < active.size(); ++j) w_active[j] = w0[active[j]];
  w_active /= w_active.sum();

  std::vector<IterationRecord> trace;
  std::vector<DropRecord> drops;
  std::vector<std::pair<long, StepDiagnostics>> deep;
  std::vector<Event> pending_events;

  struct PendingDrop {
    long k;
    std::vector<int> indices;
    double f_before;
  };
  std::optional<PendingDrop> pending_drop;

  Verdict verdict;
  Eigen::VectorXd prev_full;
  double prev_f = kNegInf;
  bool have_prev = false;

  for (long k = 0;; ++k) {
    const Eigen::VectorXd full = expand(inst.n(), active, w_active);
    const Weights wk{full};
    const double step_l1 = have_prev ? (full - prev_full).lpNorm<1>() : 0.0;

    Evaluation ev = evaluate(inst, crit, wk, cfg);

    std::vector<Event> events = std::move(pending_events);
    pending_events.clear();
    bool guard_tripped = false;
    if (ev.grad) {
      for (int i : wk.support()) {
        if (!((*ev.grad)[i] > 0.0)) {
          events.push_back({Event::Kind::NonPositiveGradient, i + 1, 0, 0.0});
        }
      }
    }
    if (have_prev && cfg.guard != MonotonicityGuard::Off && std::isfinite(prev_f) &&
        std::isfinite(ev.f)) {
      const double allowed = kMonotonicityTol * std::max(1.0, std::abs(prev_f));
      if (ev.f < prev_f - allowed) {
        events.push_back({Event::Kind::MonotonicityViolation, 0, 0, ev.f - prev_f});
        guard_tripped = cfg.guard == MonotonicityGuard::Fail;
      }
    }

    trace.push_back(IterationRecord{k, wk, ev.f, ev.grad, ev.gap, step_l1, {}});
    trace.back().events = std::move(events);

    if (pending_drop) {
      DropRecord dr;
      dr.k = pending_drop->k;
      dr.indices = pending_drop->indices;
      dr.feasible_after = ev.feasible;
      dr.objective_delta = ev.f - pending_drop->f_before;
      drops.push_back(std::move(dr));
      pending_drop.reset();
    }

    // Stopping decisions, in priority order: breakdown, cycle, gap, step,
    // max_iter.
    if (!ev.grad) {
      verdict.kind = Verdict::Kind::Breakdown;
      verdict.reason = ev.failure + " at iteration " + std::to_string(k);
      break;
    }
    if (guard_tripped) {
      verdict.kind = Verdict::Kind::Breakdown;
      verdict.reason = "monotonicity violation at iteration " + std::to_string(k);
      break;
    }
    if (auto period = detect_cycle(trace, cfg.cycle_window)) {
      trace.back().events.push_back({Event::Kind::CycleDetected, 0, *period, 0.0});
      verdict.kind = Verdict::Kind::Cycle;
      verdict.cycle_period = *period;
      break;
    }
    if (ev.gap && *ev.gap <= cfg.gap_tol) {
      verdict.kind = Verdict::Kind::Converged;
      break;
    }
    if (have_prev && step_l1 <= cfg.step_tol) {
      verdict.kind = Verdict::Kind::Converged;
      break;
    }
    if (k >= cfg.max_iter) {
      verdict.kind = Verdict::Kind::MaxIter;
      break;
    }

    if (cfg.deep_diagnostics) {
      bool applicable = std::isfinite(ev.f);
      for (int i : wk.support()) applicable = applicable && (*ev.grad)[i] > 0.0;
      if (applicable && is_pd(moment_matrix(inst, wk))) {
        StepDiagnostics diag = deep_step_diagnostics(inst, crit, wk, cfg.lambda);
        if (!diag.all_ok()) {
          trace.back().events.push_back({Event::Kind::MtildeCheckFailed, 0, 0, 0.0});
        }
        deep.emplace_back(k, std::move(diag));
      }
    }

    Eigen::VectorXd grad_active(active.size());
    for (size_t j = 0; j < active.size(); ++j) grad_active[j] = (*ev.grad)[active[j]];
    Eigen::VectorXd next_active;
    try {
      next_active = ma_step(Weights{w_active}, grad_active, cfg.lambda).vec();
    } catch (const Error& e) {
      verdict.kind = Verdict::Kind::Breakdown;
      verdict.reason = std::string(e.what()) + " at iteration " + std::to_string(k);
      break;
    }

    std::vector<int> dropped_now;
    for (size_t j = 0; j < active.size(); ++j) {
      if (w_active[j] > 0.0 && next_active[j] == 0.0) {
        dropped_now.push_back(active[j]);
        pending_events.push_back(
            {Event::Kind::SupportShrunk, active[j] + 1, 0, 0.0});
      }
    }
    if (generalized && !dropped_now.empty()) {
      PendingDrop pd;
      pd.k = k + 1;
      for (int i : dropped_now) {
        pd.indices.push_back(i + 1);
        verdict.dropped.push_back(i + 1);
      }
      pd.f_before = ev.f;
      pending_drop = pd;
      // Compact the iteration to the surviving coordinates.
      std::vector<int> new_active;
      std::vector<double> new_w;
      for (size_t j = 0; j < active.size(); ++j) {
        if (next_active[j] != 0.0) {
          new_active.push_back(active[j]);
          new_w.push_back(next_active[j]);
        }
      }
      active = std::move(new_active);
      next_active = Eigen::Map<Eigen::VectorXd>(new_w.data(), new_w.size());
    }

    prev_full = full;
    prev_f = ev.f;
    have_prev = true;
    w_active = std::move(next_active);
  }

  if (generalized && !verdict.dropped.empty() &&
      verdict.kind == Verdict::Kind::Converged) {
    verdict.kind = Verdict::Kind::DroppedAndReduced;
  }

  Weights final_w = trace.back().w;
  std::optional<OptimalityResidual> residual;
  if (trace.back().grad) {
    try {
      residual = optimality_residual(inst, crit, final_w, 1e-6,
                                     generalized ? &*cfg.generalized : nullptr);
    } catch (const Error&) {
    }
  }
  return RunResult{std::move(trace), std::move(verdict), std::move(final_w),
                   std::move(drops), residual, std::move(deep)};
}

}  // namespace madesign
