#include "sparse_polyak/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparse_polyak/errors.h"

namespace sparse_polyak {

double estimation_error(const DenseVector& theta, const DenseVector& theta_star) {
  if (theta.size() != theta_star.size()) {
    throw ParameterError("estimation_error: lengths " + std::to_string(theta.size()) + " and " +
                         std::to_string(theta_star.size()) + " differ");
  }
  return (theta - theta_star).squaredNorm();
}

SupportMetrics support_metrics(const SupportSet& estimate, const SupportSet& star) {
  SupportMetrics m;
  for (Index i : estimate) m.true_positives += star.contains(i);
  m.false_positives = estimate.size() - m.true_positives;
  m.false_negatives = star.size() - m.true_positives;
  const auto tp = static_cast<double>(m.true_positives);
  m.precision = estimate.empty() ? 1.0 : tp / static_cast<double>(estimate.size());
  m.recall = star.empty() ? 1.0 : tp / static_cast<double>(star.size());
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                      : 0.0;
  m.contains_star = m.false_negatives == 0;
  return m;
}

SupportMetrics support_metrics(const DenseVector& theta, const SupportSet& star) {
  return support_metrics(support(theta), star);
}

double snr_margin(const DenseVector& theta_star, const DenseVector& grad_at_star, std::size_t s,
                  double mu_bar) {
  if (!(mu_bar > 0.0)) throw ParameterError("snr_margin: mu_bar must be positive");
  double min_abs = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < theta_star.size(); ++i) {
    if (theta_star[i] != 0.0) min_abs = std::min(min_abs, std::abs(theta_star[i]));
  }
  if (!std::isfinite(min_abs)) throw ParameterError("snr_margin: theta* is zero");
  return min_abs - 7.0 * std::sqrt(hard_threshold_norm_sq(grad_at_star, s)) / mu_bar;
}

TheoryBounds theory_bounds(const GenSpec& spec, std::size_t s) {
  if (!spec.alpha) throw ParameterError("theory_bounds: needs alpha-mode sample sizing");
  if (s < 1) throw ParameterError("theory_bounds: s must be at least 1");
  const double w = spec.omega;
  const double alpha = *spec.alpha;
  const double sd = static_cast<double>(s);
  const double s_star = static_cast<double>(spec.s_star);

  TheoryBounds b;
  if (spec.model == ModelKind::kMatrixRegression) {
    b.lmax_bound = 1.0;
    b.zeta = 1.0;
  } else {
    b.lmax_bound = 2.0 / ((1.0 - w) * (1.0 - w) * (1.0 + w));
    b.zeta = 1.0 / (1.0 - w * w);
  }
  b.l_bar_bound = b.lmax_bound * (3.0 + 2.0 * (2.0 * sd + s_star) / (sd * alpha));
  if (spec.model == ModelKind::kLogistic) b.l_bar_bound /= 4.0;
  b.fixed_step = 2.0 / (3.0 * b.l_bar_bound);
  return b;
}

std::optional<std::size_t> iters_to_threshold(const RunTrace& trace, double threshold,
                                              double reference) {
  for (const IterationRecord& r : trace.records) {
    if (r.f_value - reference <= threshold) return r.t;
  }
  return std::nullopt;
}

std::optional<std::size_t> iters_to_threshold(const RunTrace& trace, double threshold) {
  return iters_to_threshold(trace, threshold, trace.f_hat);
}

double long_run_threshold(double f_long, double f_ref, double factor) {
  return factor * std::abs(f_long - f_ref);
}

}  // namespace sparse_polyak
