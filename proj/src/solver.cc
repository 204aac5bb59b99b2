#include "sparse_polyak/solver.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sparse_polyak/errors.h"

namespace sparse_polyak {

Projector Projector::low_rank(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw ParameterError("low_rank: empty shape");
  return Projector(rows, cols);
}

Projector Projector::for_problem(const ProblemInstance& p) {
  return p.is_matrix() ? low_rank(p.param_rows(), p.param_cols()) : sparse();
}

DenseVector Projector::project(const DenseVector& x, std::size_t budget) const {
  if (!is_low_rank()) return hard_threshold(x, budget);
  return flatten(rank_project(unflatten(x, rows_, cols_), static_cast<Index>(budget)));
}

double Projector::norm_sq(const DenseVector& g, std::size_t budget) const {
  if (!is_low_rank()) return hard_threshold_norm_sq(g, budget);
  const auto max_rank = static_cast<std::size_t>(std::min(rows_, cols_));
  return rank_project_norm_sq(unflatten(g, rows_, cols_),
                              static_cast<Index>(std::min(budget, max_rank)));
}

std::size_t Projector::complexity(const DenseVector& x) const {
  if (!is_low_rank()) return count_nonzeros(x);
  return static_cast<std::size_t>(numerical_rank(unflatten(x, rows_, cols_)));
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kFixed:
      return "fixed";
    case StepKind::kClassicalPolyak:
      return "classical_polyak";
    case StepKind::kSparsePolyak:
      return "sparse_polyak";
    case StepKind::kSparsePolyak2s:
      return "sparse_polyak_2s";
  }
  return "unknown";
}

StepKind parse_step_kind(std::string_view name) {
  if (name == "fixed") return StepKind::kFixed;
  if (name == "classical_polyak") return StepKind::kClassicalPolyak;
  if (name == "sparse_polyak") return StepKind::kSparsePolyak;
  if (name == "sparse_polyak_2s") return StepKind::kSparsePolyak2s;
  throw ParameterError("unknown step rule '" + std::string(name) + "'");
}

StepRule StepRule::fixed(double gamma) {
  StepRule r{StepKind::kFixed, gamma, 1.0};
  r.validate();
  return r;
}

StepRule StepRule::classical_polyak(double denom_scale) {
  StepRule r{StepKind::kClassicalPolyak, 0.0, denom_scale};
  r.validate();
  return r;
}

StepRule StepRule::sparse_polyak(double denom_scale) {
  StepRule r{StepKind::kSparsePolyak, 0.0, denom_scale};
  r.validate();
  return r;
}

StepRule StepRule::sparse_polyak_2s(double denom_scale) {
  StepRule r{StepKind::kSparsePolyak2s, 0.0, denom_scale};
  r.validate();
  return r;
}

void StepRule::validate() const {
  if (kind == StepKind::kFixed && !(fixed_step > 0.0 && std::isfinite(fixed_step))) {
    throw ParameterError("fixed step size must be positive and finite");
  }
  if (!(denom_scale > 0.0 && std::isfinite(denom_scale))) {
    throw ParameterError("denom_scale must be positive and finite");
  }
}

StepDecision compute_step(const StepRule& rule, double f_t, double f_hat, const DenseVector& g,
                          std::size_t s, const Projector& projector) {
  StepDecision out;
  switch (rule.kind) {
    case StepKind::kFixed:
      out.denom_norm_sq = projector.norm_sq(g, s);
      out.gamma = rule.fixed_step;
      return out;
    case StepKind::kClassicalPolyak:
      out.denom_norm_sq = g.squaredNorm();
      break;
    case StepKind::kSparsePolyak:
      out.denom_norm_sq = projector.norm_sq(g, s);
      break;
    case StepKind::kSparsePolyak2s:
      out.denom_norm_sq = projector.norm_sq(g, 2 * s);
      break;
  }
  const double numerator = std::max(f_t - f_hat, 0.0);
  if (!std::isfinite(numerator)) {
    throw NumericError("Polyak step needs a finite target value");
  }
  if (numerator == 0.0) return out;
  const double denominator = rule.denom_scale * out.denom_norm_sq;
  if (denominator < kStallDenominator) {
    out.stalled = true;
    return out;
  }
  out.gamma = numerator / denominator;
  if (!std::isfinite(out.gamma)) throw NumericError("step size is not finite");
  return out;
}

void SolverConfig::validate() const {
  if (s < 1) throw ParameterError("s must be at least 1");
  if (max_iters < 1) throw ParameterError("max_iters must be at least 1");
  if (!(tol_f >= 0.0)) throw ParameterError("tol_f must be non-negative");
  step_rule.validate();
  if (step_rule.kind != StepKind::kFixed && !std::isfinite(f_hat)) {
    throw ParameterError("Polyak step rules need a finite f_hat");
  }
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kMaxIters:
      return "max_iters";
    case Termination::kStalled:
      return "stalled";
    case Termination::kToleranceReached:
      return "tolerance_reached";
  }
  return "unknown";
}

StepOutcome iht_step(const ProblemInstance& p, const DenseVector& theta_t,
                     const SolverConfig& cfg, std::size_t t, const DenseVector* theta_ref) {
  const Projector projector = Projector::for_problem(p);
  const ObjectiveEval eval = evaluate(p, theta_t);
  const StepDecision step =
      compute_step(cfg.step_rule, eval.value, cfg.f_hat, eval.gradient, cfg.s, projector);

  StepOutcome out;
  out.record.t = t;
  out.record.f_value = eval.value;
  out.record.gamma = step.gamma;
  out.record.grad_ht_norm_sq = cfg.step_rule.kind == StepKind::kSparsePolyak ||
                                       cfg.step_rule.kind == StepKind::kFixed
                                   ? step.denom_norm_sq
                                   : projector.norm_sq(eval.gradient, cfg.s);
  if (theta_ref) out.record.error_to_ref = (theta_t - *theta_ref).squaredNorm();
  out.record.support = support(theta_t);

  if (step.gamma == 0.0) {
    // theta_t is already within budget, so P_s(theta_t) = theta_t.
    out.stalled = true;
    out.next = theta_t;
    return out;
  }
  out.next = projector.project(theta_t - step.gamma * eval.gradient, cfg.s);
  if (!out.next.allFinite()) {
    throw NumericError("iterate " + std::to_string(t + 1) + " is not finite (f = " +
                       std::to_string(eval.value) + ", gamma = " + std::to_string(step.gamma) +
                       ")");
  }
  return out;
}

namespace {

void check_start(const ProblemInstance& p, const DenseVector& theta_0, std::size_t s) {
  if (theta_0.size() != p.dim()) {
    throw ParameterError("theta_0 has length " + std::to_string(theta_0.size()) +
                         ", expected " + std::to_string(p.dim()));
  }
  if (Projector::for_problem(p).complexity(theta_0) > s) {
    throw ParameterError("theta_0 exceeds the budget s = " + std::to_string(s));
  }
}

const DenseVector* ref_ptr(const std::optional<DenseVector>& ref) {
  return ref ? &*ref : nullptr;
}

}  // namespace

RunTrace run_iht(const ProblemInstance& p, const DenseVector& theta_0, const SolverConfig& cfg,
                 const std::optional<DenseVector>& theta_ref) {
  cfg.validate();
  check_start(p, theta_0, cfg.s);

  RunTrace trace;
  trace.f_hat = cfg.f_hat;
  DenseVector theta = theta_0;
  for (std::size_t t = 0;; ++t) {
    StepOutcome step = iht_step(p, theta, cfg, t, ref_ptr(theta_ref));
    const double gap = step.record.f_value - cfg.f_hat;
    trace.records.push_back(std::move(step.record));
    if (step.stalled) {
      trace.termination = Termination::kStalled;
      break;
    }
    if (gap <= cfg.tol_f) {
      trace.termination = Termination::kToleranceReached;
      break;
    }
    if (t == cfg.max_iters) {
      trace.termination = Termination::kMaxIters;
      break;
    }
    theta = std::move(step.next);
  }
  trace.final_theta = std::move(theta);
  return trace;
}

void AdaptiveConfig::validate() const {
  if (s < 1) throw ParameterError("s must be at least 1");
  if (inner_T < 1) throw ParameterError("inner_T must be at least 1");
  if (outer_K < 1) throw ParameterError("outer_K must be at least 1");
  if (!std::isfinite(f_tilde_1)) throw ParameterError("f_tilde_1 must be finite");
  if (!(denom_scale > 0.0)) throw ParameterError("denom_scale must be positive");
}

AdaptiveResult run_adaptive(const ProblemInstance& p, const DenseVector& theta_0,
                            const AdaptiveConfig& cfg,
                            const std::optional<DenseVector>& theta_ref) {
  cfg.validate();
  check_start(p, theta_0, cfg.s);

  AdaptiveResult out;
  double lower = cfg.f_tilde_1;
  DenseVector start = theta_0;
  for (std::size_t k = 0; k < cfg.outer_K; ++k) {
    SolverConfig inner;
    inner.s = cfg.s;
    inner.f_hat = lower;
    inner.max_iters = cfg.inner_T;
    inner.rng_seed = cfg.rng_seed;
    inner.step_rule = StepRule::sparse_polyak(cfg.denom_scale);

    RunTrace trace;
    trace.f_hat = lower;
    trace.termination = Termination::kMaxIters;
    DenseVector theta = start;
    DenseVector best = start;
    double best_f = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t <= cfg.inner_T; ++t) {
      StepOutcome step = iht_step(p, theta, inner, t, ref_ptr(theta_ref));
      if (step.record.f_value < best_f) {
        best_f = step.record.f_value;
        best = theta;
      }
      trace.records.push_back(std::move(step.record));
      // A zero step leaves every later inner iterate equal to this one.
      if (step.stalled) {
        trace.termination = Termination::kStalled;
        break;
      }
      if (t == cfg.inner_T) break;
      theta = std::move(step.next);
    }
    trace.final_theta = std::move(theta);

    out.lower_bounds.push_back(lower);
    out.epoch_best.push_back(best_f);
    out.epochs.push_back(std::move(trace));
    if (k == 0 || best_f < out.f_bar) {
      out.f_bar = best_f;
      out.theta_bar = best;
    }
    lower = 0.5 * (best_f + lower);
    start = std::move(best);
  }
  return out;
}

}  // namespace sparse_polyak
