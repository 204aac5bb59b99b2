#include "sparse_polyak/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "sparse_polyak/errors.h"
#include "sparse_polyak/random.h"

namespace sparse_polyak {

SupportSet::SupportSet(std::vector<Index> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0) {
      throw ParameterError("SupportSet: negative index");
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw ParameterError("SupportSet: indices must be strictly increasing");
    }
  }
}

SupportSet::SupportSet(std::initializer_list<Index> indices)
    : SupportSet(std::vector<Index>(indices)) {}

bool SupportSet::contains(Index i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

bool SupportSet::includes(const SupportSet& other) const {
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(),
                       other.indices_.end());
}

bool all_finite(const DenseVector& x) { return x.allFinite(); }
bool all_finite(const DenseMatrix& a) { return a.allFinite(); }

namespace {

// Strict total order: larger magnitude first, then smaller index.
struct MagnitudeThenIndex {
  const DenseVector& x;
  bool operator()(Index a, Index b) const {
    const double ma = std::abs(x[a]);
    const double mb = std::abs(x[b]);
    return ma > mb || (ma == mb && a < b);
  }
};

}  // namespace

std::vector<Index> top_k_indices(const DenseVector& x, std::size_t s) {
  const auto d = static_cast<std::size_t>(x.size());
  if (s > d) {
    throw ParameterError("hard_threshold: s = " + std::to_string(s) +
                         " exceeds dimension " + std::to_string(d));
  }
  if (!x.allFinite()) {
    throw NumericError("hard_threshold: non-finite input");
  }
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  if (s < d) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s),
                     order.end(), MagnitudeThenIndex{x});
  }
  order.resize(s);
  std::sort(order.begin(), order.end());
  return order;
}

DenseVector hard_threshold(const DenseVector& x, std::size_t s) {
  DenseVector out = DenseVector::Zero(x.size());
  for (Index i : top_k_indices(x, s)) out[i] = x[i];
  return out;
}

double hard_threshold_norm_sq(const DenseVector& x, std::size_t s) {
  const auto d = static_cast<std::size_t>(x.size());
  s = std::min(s, d);
  if (s == d) return x.squaredNorm();
  std::vector<double> sq(d);
  for (std::size_t i = 0; i < d; ++i) sq[i] = x[static_cast<Index>(i)] * x[static_cast<Index>(i)];
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(s), sq.end(),
                   std::greater<>());
  // Sum in ascending order so the total does not depend on nth_element's
  // internal arrangement.
  std::sort(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(s));
  double total = 0.0;
  for (std::size_t i = 0; i < s; ++i) total += sq[i];
  return total;
}

SupportSet support(const DenseVector& x) {
  std::vector<Index> idx;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) idx.push_back(i);
  }
  return SupportSet(std::move(idx));
}

std::size_t count_nonzeros(const DenseVector& x) {
  std::size_t n = 0;
  for (Index i = 0; i < x.size(); ++i) n += (x[i] != 0.0);
  return n;
}

namespace {

DenseMatrix orthonormal_basis(const DenseMatrix& z) {
  Eigen::HouseholderQR<DenseMatrix> qr(z);
  return qr.householderQ() * DenseMatrix::Identity(z.rows(), z.cols());
}

// Completes `basis` (orthonormal columns 0..filled-1) with unit vectors
// orthogonal to the existing ones.
void complete_orthonormal(DenseMatrix& basis, Index filled) {
  const Index m = basis.rows();
  Index next = filled;
  for (Index e = 0; e < m && next < basis.cols(); ++e) {
    DenseVector cand = DenseVector::Unit(m, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < next; ++j) {
        cand -= basis.col(j).dot(cand) * basis.col(j);
      }
    }
    const double norm = cand.norm();
    if (norm > 1e-8) basis.col(next++) = cand / norm;
  }
}

}  // namespace

SvdResult truncated_svd(const DenseMatrix& a, Index k) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index r = std::min(m, n);
  if (k < 1 || k > r) {
    throw ParameterError("truncated_svd: rank " + std::to_string(k) + " outside [1, " +
                         std::to_string(r) + "]");
  }
  if (!a.allFinite()) {
    throw NumericError("truncated_svd: non-finite entries");
  }

  SvdResult out;
  const double fro = a.norm();
  if (fro == 0.0) {
    out.singular_values = DenseVector::Zero(k);
    out.u = DenseMatrix::Identity(m, k);
    out.v = DenseMatrix::Identity(n, k);
    return out;
  }

  // Oversampled block; the extra columns absorb the spectral gap at k.
  const Index p = std::min(r, std::max(2 * k, k + 4));
  Rng rng(0x5eedULL);
  DenseMatrix start(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) start(i, j) = rng.normal();
  }
  DenseMatrix q = orthonormal_basis(start);

  const double residual_tol = 0.5e-8 * fro;
  DenseVector previous = DenseVector::Constant(k, -1.0);
  for (std::size_t iter = 1; iter <= kSvdMaxIterations; ++iter) {
    q = orthonormal_basis(a.transpose() * (a * q));

    const DenseMatrix b = a * q;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(b.transpose() * b);
    // Eigenvalues come back ascending; reverse to descending.
    const DenseMatrix w = eig.eigenvectors().rowwise().reverse();
    const DenseVector lambda = eig.eigenvalues().reverse();

    DenseVector sigma(k);
    for (Index i = 0; i < k; ++i) sigma[i] = std::sqrt(std::max(lambda[i], 0.0));
    DenseMatrix v = q * w.leftCols(k);
    DenseMatrix u(m, k);
    Index nonzero = 0;
    for (Index i = 0; i < k; ++i) {
      if (sigma[i] <= 1e-14 * fro) break;
      u.col(i) = (b * w.col(i)) / sigma[i];
      ++nonzero;
    }
    for (Index i = nonzero; i < k; ++i) sigma[i] = 0.0;
    complete_orthonormal(u, nonzero);

    const double sigma_tol = 1e-10 * sigma[0];
    bool converged = true;
    for (Index i = 0; i < k && converged; ++i) {
      if (std::abs(sigma[i] - previous[i]) > sigma_tol) converged = false;
      const double left = (a * v.col(i) - sigma[i] * u.col(i)).norm();
      const double right = (a.transpose() * u.col(i) - sigma[i] * v.col(i)).norm();
      if (left > residual_tol || right > residual_tol) converged = false;
    }
    if (converged) {
      out.singular_values = std::move(sigma);
      out.u = std::move(u);
      out.v = std::move(v);
      return out;
    }
    previous = sigma;
  }
  throw ConvergenceError("truncated_svd: no convergence", kSvdMaxIterations);
}

DenseMatrix rank_project(const DenseMatrix& a, Index s) {
  const SvdResult svd = truncated_svd(a, s);
  return svd.u * svd.singular_values.asDiagonal() * svd.v.transpose();
}

double rank_project_norm_sq(const DenseMatrix& a, Index s) {
  return truncated_svd(a, s).singular_values.squaredNorm();
}

Index numerical_rank(const DenseMatrix& a, double rel_tol) {
  const Index r = std::min(a.rows(), a.cols());
  if (r == 0) return 0;
  const DenseVector sigma = truncated_svd(a, r).singular_values;
  Index rank = 0;
  for (Index i = 0; i < r; ++i) rank += (sigma[i] > rel_tol * sigma[0]);
  return rank;
}

DenseVector flatten(const DenseMatrix& a) {
  DenseVector x(a.size());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) x[i * a.cols() + j] = a(i, j);
  }
  return x;
}

DenseMatrix unflatten(const DenseVector& x, Index rows, Index cols) {
  if (rows * cols != x.size()) {
    throw ParameterError("unflatten: size " + std::to_string(x.size()) + " != " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  DenseMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = x[i * cols + j];
  }
  return a;
}

}  // namespace sparse_polyak
