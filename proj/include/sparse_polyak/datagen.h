#ifndef SPARSE_POLYAK_DATAGEN_H_
#define SPARSE_POLYAK_DATAGEN_H_

#include <cstdint>
#include <optional>

#include "sparse_polyak/core.h"
#include "sparse_polyak/objectives.h"
#include "sparse_polyak/random.h"

namespace sparse_polyak {

// Synthetic instance recipe. Sample size is either explicit (`n`) or
// ceil(alpha * s * ln d) for the algorithm budget `s`.
struct GenSpec {
  Index d = 0;
  Index s_star = 0;  // true sparsity, or true rank for the matrix model
  std::optional<double> alpha;
  std::optional<Index> n;
  double omega = 0.0;      // AR(1) correlation across features
  double noise_var = 0.0;  // response noise variance (linear / matrix)
  ModelKind model = ModelKind::kLeastSquares;
  std::uint64_t seed = 0;

  // Throws ParameterError naming the offending field.
  void validate() const;
};

struct GroundTruth {
  DenseVector theta_star;  // flattened row-major for the matrix model
  SupportSet support_star;
  double f_star = 0.0;     // objective at theta_star on the generated data
};

struct GeneratedInstance {
  ProblemInstance problem;
  GroundTruth truth;
};

// ceil(alpha * s * ln d).
Index sample_size(double alpha, std::size_t s, Index d);
Index resolve_sample_size(const GenSpec& spec, std::size_t s);

// n x d design, samples as rows. Each row is an AR(1) sequence across the
// feature index: x_0 = e_0 / sqrt(1 - omega^2), x_{k+1} = omega x_k + e_{k+1}
// with fresh standard normals, so every feature has variance 1/(1 - omega^2)
// and neighbouring features have correlation omega.
DenseMatrix gen_ar1_design(Index d, Index n, double omega, Rng& rng);

// Uniformly random support of size s_star with i.i.d. N(0, 1) values.
// f_star is left at zero.
GroundTruth gen_theta_star(Index d, Index s_star, Rng& support_rng, Rng& values_rng);

// Linear / matrix: y = X theta + N(0, noise_var). Logistic: y ~ Bernoulli(
// sigmoid(x_i^T theta)); noise_var is ignored.
DenseVector gen_responses(ModelKind model, const DenseMatrix& x, const DenseVector& theta_star,
                          double noise_var, Rng& rng);

// Rank-s_star Theta* = A B^T (A, B d x s_star standard Gaussian), n sensors
// with i.i.d. N(0, 1) entries and y_i = <X_i, Theta*> + N(0, noise_var).
GeneratedInstance gen_matrix_instance(Index d, Index s_star, Index n, double noise_var,
                                      std::uint64_t seed);

// Full instance for `spec`; `s` is the algorithm budget used by the sample
// size rule. Design, support, values and noise come from separate substreams
// of spec.seed, so changing noise_var leaves X and theta* unchanged.
GeneratedInstance generate(const GenSpec& spec, std::size_t s);

}  // namespace sparse_polyak

#endif  // SPARSE_POLYAK_DATAGEN_H_
