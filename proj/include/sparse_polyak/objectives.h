#ifndef SPARSE_POLYAK_OBJECTIVES_H_
#define SPARSE_POLYAK_OBJECTIVES_H_

#include <string>
#include <string_view>

#include "sparse_polyak/core.h"

namespace sparse_polyak {

enum class ModelKind { kLeastSquares, kLogistic, kMatrixRegression };

std::string_view to_string(ModelKind kind);
// Accepts "linear"/"least_squares", "logistic", "matrix"/"matrix_regression".
ModelKind parse_model_kind(std::string_view name);

// Empirical-risk objective f(theta) = (1/n) sum_i loss(z_i, theta) over a
// fixed data set. Immutable once built; value() and gradient() are safe to
// call concurrently.
//
// For matrix regression the design holds one flattened (row-major) sensor
// X_i per row and theta is the row-major flattening of the parameter matrix.
class ProblemInstance {
 public:
  // (1/2n) ||X theta - y||^2.
  static ProblemInstance least_squares(DenseMatrix design, DenseVector responses);
  // (1/n) sum log(1 + exp(x_i^T theta)) - y_i x_i^T theta; y_i in {0, 1}.
  static ProblemInstance logistic(DenseMatrix design, DenseVector responses);
  // (1/2n) sum (y_i - <X_i, Theta>)^2 with Theta of shape rows x cols.
  static ProblemInstance matrix_regression(DenseMatrix sensors, DenseVector responses,
                                           Index rows, Index cols);

  ModelKind kind() const { return kind_; }
  const DenseMatrix& design() const { return design_; }
  const DenseVector& responses() const { return responses_; }
  Index samples() const { return design_.rows(); }
  // Length of the (flattened) parameter vector.
  Index dim() const { return design_.cols(); }
  // Parameter matrix shape; (dim, 1) for the vector models.
  Index param_rows() const { return param_rows_; }
  Index param_cols() const { return param_cols_; }
  bool is_matrix() const { return kind_ == ModelKind::kMatrixRegression; }

 private:
  ProblemInstance(ModelKind kind, DenseMatrix design, DenseVector responses, Index rows,
                  Index cols);

  ModelKind kind_;
  DenseMatrix design_;
  DenseVector responses_;
  Index param_rows_;
  Index param_cols_;
};

struct ObjectiveEval {
  double value;
  DenseVector gradient;
};

// Throws ParameterError on a length mismatch and NumericError if the result
// is not finite.
double value(const ProblemInstance& p, const DenseVector& theta);
DenseVector gradient(const ProblemInstance& p, const DenseVector& theta);
// Value and gradient from a single pass over the data.
ObjectiveEval evaluate(const ProblemInstance& p, const DenseVector& theta);

// X theta, gathering only the nonzero columns of theta when it is sparse.
// Both the objectives and the response generator use this, so noiseless
// responses reproduce the model's predictions bit for bit.
DenseVector linear_predictor(const DenseMatrix& x, const DenseVector& theta);

// log(1 + e^a) without overflow.
double log1p_exp(double a);
double sigmoid(double a);

}  // namespace sparse_polyak

#endif  // SPARSE_POLYAK_OBJECTIVES_H_
