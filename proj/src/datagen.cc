#include "sparse_polyak/datagen.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sparse_polyak/errors.h"

namespace sparse_polyak {

void GenSpec::validate() const {
  if (d < 1) throw ParameterError("d: must be at least 1");
  if (s_star < 1) throw ParameterError("s_star: must be at least 1");
  if (s_star > d) {
    throw ParameterError("s_star: " + std::to_string(s_star) + " exceeds d = " +
                         std::to_string(d));
  }
  if (!(omega >= 0.0 && omega < 1.0)) throw ParameterError("omega: must lie in [0, 1)");
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
    throw ParameterError("noise_var: must be non-negative");
  }
  if (alpha.has_value() == n.has_value()) {
    throw ParameterError("alpha: exactly one of alpha or n must be given");
  }
  if (alpha && !(*alpha > 0.0 && std::isfinite(*alpha))) {
    throw ParameterError("alpha: must be positive");
  }
  if (n && *n < 1) throw ParameterError("n: must be at least 1");
}

Index sample_size(double alpha, std::size_t s, Index d) {
  if (d < 2) throw ParameterError("sample_size: needs d >= 2 (log d > 0)");
  return static_cast<Index>(
      std::ceil(alpha * static_cast<double>(s) * std::log(static_cast<double>(d))));
}

Index resolve_sample_size(const GenSpec& spec, std::size_t s) {
  return spec.n ? *spec.n : sample_size(*spec.alpha, s, spec.d);
}

DenseMatrix gen_ar1_design(Index d, Index n, double omega, Rng& rng) {
  if (!(omega >= 0.0 && omega < 1.0)) throw ParameterError("omega must lie in [0, 1)");
  if (d < 1 || n < 1) throw ParameterError("design shape must be positive");
  DenseMatrix x(n, d);
  const double head_scale = 1.0 / std::sqrt(1.0 - omega * omega);
  for (Index i = 0; i < n; ++i) {
    double prev = rng.normal() * head_scale;
    x(i, 0) = prev;
    for (Index k = 1; k < d; ++k) {
      prev = omega * prev + rng.normal();
      x(i, k) = prev;
    }
  }
  return x;
}

GroundTruth gen_theta_star(Index d, Index s_star, Rng& support_rng, Rng& values_rng) {
  if (s_star < 0 || s_star > d) throw ParameterError("s_star must lie in [0, d]");
  // Partial Fisher-Yates: the first s_star slots are a uniform sample
  // without replacement.
  std::vector<Index> pool(static_cast<std::size_t>(d));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < s_star; ++i) {
    const auto j = i + static_cast<Index>(
                           support_rng.uniform_below(static_cast<std::uint64_t>(d - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(s_star));
  std::sort(pool.begin(), pool.end());

  GroundTruth truth;
  truth.theta_star = DenseVector::Zero(d);
  for (Index idx : pool) {
    double v = 0.0;
    while (v == 0.0) v = values_rng.normal();
    truth.theta_star[idx] = v;
  }
  truth.support_star = SupportSet(std::move(pool));
  return truth;
}

DenseVector gen_responses(ModelKind model, const DenseMatrix& x, const DenseVector& theta_star,
                          double noise_var, Rng& rng) {
  if (x.cols() != theta_star.size()) {
    throw ParameterError("gen_responses: design width does not match theta*");
  }
  const DenseVector mean = linear_predictor(x, theta_star);
  DenseVector y(x.rows());
  if (model == ModelKind::kLogistic) {
    for (Index i = 0; i < y.size(); ++i) y[i] = rng.uniform() < sigmoid(mean[i]) ? 1.0 : 0.0;
    return y;
  }
  const double sd = std::sqrt(noise_var);
  for (Index i = 0; i < y.size(); ++i) {
    const double eps = rng.normal();
    y[i] = mean[i] + sd * eps;
  }
  return y;
}

GeneratedInstance gen_matrix_instance(Index d, Index s_star, Index n, double noise_var,
                                      std::uint64_t seed) {
  if (s_star < 1 || s_star > d) throw ParameterError("s_star must lie in [1, d]");
  if (n < 1) throw ParameterError("n must be at least 1");
  Rng left_rng = substream(seed, Stream::kFactorLeft);
  Rng right_rng = substream(seed, Stream::kFactorRight);
  Rng sensor_rng = substream(seed, Stream::kSensors);
  Rng noise_rng = substream(seed, Stream::kNoise);

  DenseMatrix left(d, s_star), right(d, s_star);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < s_star; ++j) left(i, j) = left_rng.normal();
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < s_star; ++j) right(i, j) = right_rng.normal();
  }
  const DenseMatrix theta = left * right.transpose();

  DenseMatrix sensors(n, d * d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d * d; ++k) sensors(i, k) = sensor_rng.normal();
  }

  GroundTruth truth;
  truth.theta_star = flatten(theta);
  truth.support_star = support(truth.theta_star);
  DenseVector y =
      gen_responses(ModelKind::kMatrixRegression, sensors, truth.theta_star, noise_var, noise_rng);
  ProblemInstance problem =
      ProblemInstance::matrix_regression(std::move(sensors), std::move(y), d, d);
  truth.f_star = value(problem, truth.theta_star);
  return GeneratedInstance{std::move(problem), std::move(truth)};
}

GeneratedInstance generate(const GenSpec& spec, std::size_t s) {
  spec.validate();
  const Index n = resolve_sample_size(spec, s);
  if (spec.model == ModelKind::kMatrixRegression) {
    return gen_matrix_instance(spec.d, spec.s_star, n, spec.noise_var, spec.seed);
  }
  Rng design_rng = substream(spec.seed, Stream::kDesign);
  Rng support_rng = substream(spec.seed, Stream::kSupport);
  Rng values_rng = substream(spec.seed, Stream::kValues);
  Rng noise_rng = substream(spec.seed, Stream::kNoise);

  DenseMatrix x = gen_ar1_design(spec.d, n, spec.omega, design_rng);
  GroundTruth truth = gen_theta_star(spec.d, spec.s_star, support_rng, values_rng);
  DenseVector y = gen_responses(spec.model, x, truth.theta_star, spec.noise_var, noise_rng);
  ProblemInstance problem = spec.model == ModelKind::kLogistic
                                ? ProblemInstance::logistic(std::move(x), std::move(y))
                                : ProblemInstance::least_squares(std::move(x), std::move(y));
  truth.f_star = value(problem, truth.theta_star);
  return GeneratedInstance{std::move(problem), std::move(truth)};
}

}  // namespace sparse_polyak
