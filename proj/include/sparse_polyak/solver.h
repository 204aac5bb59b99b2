#ifndef SPARSE_POLYAK_SOLVER_H_
#define SPARSE_POLYAK_SOLVER_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "sparse_polyak/core.h"
#include "sparse_polyak/objectives.h"

namespace sparse_polyak {

// Projection onto the budget set: HT_s for vector models, PM_s for matrix
// models (theta holds the row-major flattened matrix).
class Projector {
 public:
  static Projector sparse() { return Projector(0, 0); }
  static Projector low_rank(Index rows, Index cols);
  static Projector for_problem(const ProblemInstance& p);

  bool is_low_rank() const { return rows_ > 0; }

  DenseVector project(const DenseVector& x, std::size_t budget) const;
  // ||P_budget(g)||^2. The budget is clamped to the largest meaningful value
  // (dimension, or min(rows, cols)).
  double norm_sq(const DenseVector& g, std::size_t budget) const;
  // ||x||_0, or the numerical rank in matrix mode.
  std::size_t complexity(const DenseVector& x) const;

 private:
  Projector(Index rows, Index cols) : rows_(rows), cols_(cols) {}

  Index rows_;
  Index cols_;
};

enum class StepKind { kFixed, kClassicalPolyak, kSparsePolyak, kSparsePolyak2s };

std::string_view to_string(StepKind kind);
StepKind parse_step_kind(std::string_view name);

struct StepRule {
  StepKind kind = StepKind::kSparsePolyak;
  double fixed_step = 0.0;   // used by kFixed only
  double denom_scale = 5.0;  // Polyak rules: denominator multiplier

  static StepRule fixed(double gamma);
  static StepRule classical_polyak(double denom_scale = 1.0);
  static StepRule sparse_polyak(double denom_scale = 5.0);
  // Thresholds the gradient at width 2s in the denominator (GLM variant).
  static StepRule sparse_polyak_2s(double denom_scale = 5.0);

  // Throws ParameterError unless fixed_step > 0 (kFixed) and denom_scale > 0.
  void validate() const;
};

inline constexpr double kStallDenominator = 1e-300;

struct StepDecision {
  double gamma = 0.0;
  // The norm in the rule's denominator: ||P_s(g)||^2, ||P_2s(g)||^2 or
  // ||g||^2. Always ||P_s(g)||^2 for kFixed.
  double denom_norm_sq = 0.0;
  // Positive numerator over a vanishing denominator; the caller stops.
  bool stalled = false;
};

// gamma_t for one iteration:
//   Fixed            gamma
//   ClassicalPolyak  max{f_t - f_hat, 0} / (c ||g||^2)
//   SparsePolyak     max{f_t - f_hat, 0} / (c ||P_s(g)||^2)
//   SparsePolyak2s   max{f_t - f_hat, 0} / (c ||P_2s(g)||^2)
StepDecision compute_step(const StepRule& rule, double f_t, double f_hat, const DenseVector& g,
                          std::size_t s, const Projector& projector = Projector::sparse());

struct SolverConfig {
  std::size_t s = 1;
  // Target value. -infinity is allowed for the fixed rule (no target).
  double f_hat = -std::numeric_limits<double>::infinity();
  std::size_t max_iters = 1000;
  // Stop once f(theta_t) - f_hat <= tol_f.
  double tol_f = 0.0;
  // Recorded with the trace; the iteration itself draws no randomness.
  std::uint64_t rng_seed = 0;
  StepRule step_rule;

  void validate() const;
};

struct IterationRecord {
  std::size_t t = 0;
  double f_value = 0.0;
  double gamma = 0.0;
  // ||P_s(grad f(theta_t))||^2 regardless of the step rule.
  double grad_ht_norm_sq = 0.0;
  std::optional<double> error_to_ref;
  SupportSet support;
};

enum class Termination { kMaxIters, kStalled, kToleranceReached };

std::string_view to_string(Termination t);

struct RunTrace {
  std::vector<IterationRecord> records;  // t = 0, 1, ...
  DenseVector final_theta;
  Termination termination = Termination::kMaxIters;
  double f_hat = 0.0;
};

struct StepOutcome {
  DenseVector next;
  IterationRecord record;
  bool stalled = false;  // gamma_t == 0: next equals the current iterate
};

// One IHT iteration from theta_t:
//   theta_{t+1} = P_s(theta_t - gamma_t grad f(theta_t)).
// theta_ref only feeds record.error_to_ref.
StepOutcome iht_step(const ProblemInstance& p, const DenseVector& theta_t,
                     const SolverConfig& cfg, std::size_t t = 0,
                     const DenseVector* theta_ref = nullptr);

// Iterates from theta_0 until one of:
//   gamma_t == 0 (f <= f_hat, or the stall guard fired)  -> kStalled
//   f(theta_t) - f_hat <= tol_f                          -> kToleranceReached
//   t == max_iters                                       -> kMaxIters
// Every visited iterate, including t = 0 and the last one, is recorded.
// Throws ParameterError if theta_0 exceeds the budget and NumericError if an
// iterate becomes non-finite.
RunTrace run_iht(const ProblemInstance& p, const DenseVector& theta_0, const SolverConfig& cfg,
                 const std::optional<DenseVector>& theta_ref = std::nullopt);

struct AdaptiveConfig {
  double f_tilde_1 = 0.0;  // initial lower bound on the optimal value
  std::size_t inner_T = 100;
  std::size_t outer_K = 5;
  std::size_t s = 1;
  double denom_scale = 10.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct AdaptiveResult {
  std::vector<RunTrace> epochs;     // one trace per outer iteration
  std::vector<double> lower_bounds; // f~_k used by epoch k
  std::vector<double> epoch_best;   // f(theta_bar_k)
  DenseVector theta_bar;            // argmin_k f(theta_bar_k)
  double f_bar = 0.0;
};

// Double loop with an adaptively raised lower bound: each epoch runs inner_T
// Sparse Polyak steps against f~_k from the previous epoch's best iterate,
// then sets f~_{k+1} = (f(theta_bar_k) + f~_k) / 2.
AdaptiveResult run_adaptive(const ProblemInstance& p, const DenseVector& theta_0,
                            const AdaptiveConfig& cfg,
                            const std::optional<DenseVector>& theta_ref = std::nullopt);

}  // namespace sparse_polyak

#endif  // SPARSE_POLYAK_SOLVER_H_
