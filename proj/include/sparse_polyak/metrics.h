#ifndef SPARSE_POLYAK_METRICS_H_
#define SPARSE_POLYAK_METRICS_H_

#include <cstddef>
#include <optional>

#include "sparse_polyak/core.h"
#include "sparse_polyak/datagen.h"
#include "sparse_polyak/solver.h"

namespace sparse_polyak {

// ||theta - theta_star||^2 (squared Frobenius for flattened matrices).
double estimation_error(const DenseVector& theta, const DenseVector& theta_star);

struct SupportMetrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool contains_star = false;  // S* is a subset of supp(theta)
};

// Conventions for empty sets: precision is 1 when supp(theta) is empty,
// recall is 1 when S* is empty.
SupportMetrics support_metrics(const SupportSet& estimate, const SupportSet& star);
SupportMetrics support_metrics(const DenseVector& theta, const SupportSet& star);

// |theta*|_min - 7 ||HT_s(grad_at_star)|| / mu_bar, where |.|_min runs over
// the nonzero entries. Positive when the minimum-signal condition holds.
// mu_bar is an oracle value supplied by the caller.
double snr_margin(const DenseVector& theta_star, const DenseVector& grad_at_star, std::size_t s,
                  double mu_bar);

struct TheoryBounds {
  double lmax_bound = 0.0;   // lambda_max(Sigma) <= 2 / ((1 - w)^2 (1 + w))
  double l_bar_bound = 0.0;  // restricted smoothness bound
  double fixed_step = 0.0;   // 2 / (3 L_bar)
  double zeta = 0.0;         // max diagonal of Sigma
};

// Needs spec.alpha. Linear: L_bar = lmax (3 + 2 (2s + s*) / (s alpha));
// logistic uses a quarter of that; the matrix model (Sigma = I) uses lmax = 1.
TheoryBounds theory_bounds(const GenSpec& spec, std::size_t s);

// Smallest t with f(theta_t) - reference <= threshold.
std::optional<std::size_t> iters_to_threshold(const RunTrace& trace, double threshold,
                                              double reference);
// Same, measured against the trace's own f_hat.
std::optional<std::size_t> iters_to_threshold(const RunTrace& trace, double threshold);

inline constexpr double kLongRunFactor = 1.05;

// Objective-gap threshold for "near optimal statistical precision":
// factor * |f_long - f_ref|, with f_long the final value of a long reference
// run. On noisy data the budget-s minimizer sits below f(theta*), so the
// long-run gap is negative and its magnitude sets the precision scale.
double long_run_threshold(double f_long, double f_ref, double factor = kLongRunFactor);

}  // namespace sparse_polyak

#endif  // SPARSE_POLYAK_METRICS_H_
