#include "sparse_polyak/objectives.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sparse_polyak/errors.h"

namespace sparse_polyak {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLeastSquares:
      return "linear";
    case ModelKind::kLogistic:
      return "logistic";
    case ModelKind::kMatrixRegression:
      return "matrix";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear" || name == "least_squares") return ModelKind::kLeastSquares;
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "matrix" || name == "matrix_regression") return ModelKind::kMatrixRegression;
  throw ParameterError("unknown model kind '" + std::string(name) + "'");
}

ProblemInstance::ProblemInstance(ModelKind kind, DenseMatrix design, DenseVector responses,
                                 Index rows, Index cols)
    : kind_(kind),
      design_(std::move(design)),
      responses_(std::move(responses)),
      param_rows_(rows),
      param_cols_(cols) {
  if (design_.rows() != responses_.size()) {
    throw ParameterError("design has " + std::to_string(design_.rows()) +
                         " rows but there are " + std::to_string(responses_.size()) +
                         " responses");
  }
  if (design_.rows() == 0 || design_.cols() == 0) {
    throw ParameterError("empty design matrix");
  }
  if (rows * cols != design_.cols()) {
    throw ParameterError("parameter shape does not match design width");
  }
  if (!design_.allFinite() || !responses_.allFinite()) {
    throw NumericError("non-finite entries in problem data");
  }
  if (kind_ == ModelKind::kLogistic) {
    for (Index i = 0; i < responses_.size(); ++i) {
      if (responses_[i] != 0.0 && responses_[i] != 1.0) {
        throw ParameterError("logistic response " + std::to_string(i) +
                             " is not in {0, 1}");
      }
    }
  }
}

ProblemInstance ProblemInstance::least_squares(DenseMatrix design, DenseVector responses) {
  const Index d = design.cols();
  return ProblemInstance(ModelKind::kLeastSquares, std::move(design), std::move(responses), d,
                         1);
}

ProblemInstance ProblemInstance::logistic(DenseMatrix design, DenseVector responses) {
  const Index d = design.cols();
  return ProblemInstance(ModelKind::kLogistic, std::move(design), std::move(responses), d, 1);
}

ProblemInstance ProblemInstance::matrix_regression(DenseMatrix sensors, DenseVector responses,
                                                   Index rows, Index cols) {
  return ProblemInstance(ModelKind::kMatrixRegression, std::move(sensors),
                         std::move(responses), rows, cols);
}

double log1p_exp(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

DenseVector linear_predictor(const DenseMatrix& x, const DenseVector& theta) {
  if (x.cols() != theta.size()) {
    throw ParameterError("linear_predictor: design width does not match theta");
  }
  const std::size_t nnz = count_nonzeros(theta);
  if (4 * nnz >= static_cast<std::size_t>(theta.size())) {
    return x * theta;
  }
  DenseVector out = DenseVector::Zero(x.rows());
  for (Index j = 0; j < theta.size(); ++j) {
    if (theta[j] != 0.0) out.noalias() += theta[j] * x.col(j);
  }
  return out;
}

namespace {

void check_dim(const ProblemInstance& p, const DenseVector& theta) {
  if (theta.size() != p.dim()) {
    throw ParameterError("theta has length " + std::to_string(theta.size()) +
                         ", expected " + std::to_string(p.dim()));
  }
}

DenseVector margins(const ProblemInstance& p, const DenseVector& theta) {
  return linear_predictor(p.design(), theta);
}

// Loss value and d(loss)/d(margin) per sample, both already scaled by 1/n.
double loss_and_weights(const ProblemInstance& p, const DenseVector& m, DenseVector* weights) {
  const DenseVector& y = p.responses();
  const double n = static_cast<double>(p.samples());
  double total = 0.0;
  if (p.kind() == ModelKind::kLogistic) {
    // log(1 + e^m) - y m with y in {0, 1}.
    for (Index i = 0; i < m.size(); ++i) total += log1p_exp(y[i] != 0.0 ? -m[i] : m[i]);
    if (weights) {
      weights->resize(m.size());
      for (Index i = 0; i < m.size(); ++i) (*weights)[i] = (sigmoid(m[i]) - y[i]) / n;
    }
    return total / n;
  }
  DenseVector r = m - y;
  total = 0.5 * r.squaredNorm() / n;
  if (weights) *weights = r / n;
  return total;
}

}  // namespace

double value(const ProblemInstance& p, const DenseVector& theta) {
  check_dim(p, theta);
  const double f = loss_and_weights(p, margins(p, theta), nullptr);
  if (!std::isfinite(f)) throw NumericError("objective value is not finite");
  return f;
}

ObjectiveEval evaluate(const ProblemInstance& p, const DenseVector& theta) {
  check_dim(p, theta);
  DenseVector w;
  ObjectiveEval out;
  out.value = loss_and_weights(p, margins(p, theta), &w);
  out.gradient.noalias() = p.design().transpose() * w;
  if (!std::isfinite(out.value) || !out.gradient.allFinite()) {
    throw NumericError("objective value or gradient is not finite");
  }
  return out;
}

DenseVector gradient(const ProblemInstance& p, const DenseVector& theta) {
  return evaluate(p, theta).gradient;
}

}  // namespace sparse_polyak
