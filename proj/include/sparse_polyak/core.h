#ifndef SPARSE_POLYAK_CORE_H_
#define SPARSE_POLYAK_CORE_H_

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

namespace sparse_polyak {

using DenseVector = Eigen::VectorXd;
// Column-major: the objectives stream whole columns for X^T r and gather
// only the support columns for X theta.
using DenseMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Sorted, duplicate-free set of coordinate indices.
class SupportSet {
 public:
  SupportSet() = default;
  // Throws ParameterError unless `indices` is strictly increasing and
  // non-negative.
  explicit SupportSet(std::vector<Index> indices);
  SupportSet(std::initializer_list<Index> indices);

  const std::vector<Index>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(Index i) const;
  // True iff every index of `other` is in this set.
  bool includes(const SupportSet& other) const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<Index> indices_;
};

bool all_finite(const DenseVector& x);
bool all_finite(const DenseMatrix& a);

// HT_s: keeps the s largest-magnitude entries of x and zeroes the rest. Among
// equal magnitudes the smaller index is kept, so the result is the unique
// lexicographically-first Euclidean projection onto {v : ||v||_0 <= s}.
// Throws ParameterError if s > x.size(), NumericError on non-finite input.
DenseVector hard_threshold(const DenseVector& x, std::size_t s);

// Indices kept by hard_threshold(x, s), ascending.
std::vector<Index> top_k_indices(const DenseVector& x, std::size_t s);

// ||HT_s(x)||^2 without materializing the thresholded vector. s is clamped
// to x.size().
double hard_threshold_norm_sq(const DenseVector& x, std::size_t s);

// Indices of entries that are not exactly zero.
SupportSet support(const DenseVector& x);

// Number of entries that are not exactly zero.
std::size_t count_nonzeros(const DenseVector& x);

struct SvdResult {
  DenseVector singular_values;  // descending, non-negative
  DenseMatrix u;                // rows x k, orthonormal columns
  DenseMatrix v;                // cols x k, orthonormal columns
};

// Top-k singular triplets of `a` by subspace (block power) iteration on
// A^T A with Householder re-orthonormalization and Rayleigh-Ritz extraction.
// Every returned triplet satisfies ||A v_i - s_i u_i|| <= 1e-8 ||A||_F and
// ||A^T u_i - s_i v_i|| <= 1e-8 ||A||_F.
//
// Throws ParameterError unless 1 <= k <= min(rows, cols), NumericError on
// non-finite entries and ConvergenceError after kSvdMaxIterations sweeps.
SvdResult truncated_svd(const DenseMatrix& a, Index k);

inline constexpr std::size_t kSvdMaxIterations = 1000;

// PM_s: sum of the top-s singular triplets, the Frobenius-nearest matrix of
// rank <= s (Eckart-Young).
DenseMatrix rank_project(const DenseMatrix& a, Index s);

// ||PM_s(a)||_F^2 = sum of the s largest squared singular values.
double rank_project_norm_sq(const DenseMatrix& a, Index s);

// Number of singular values above rel_tol * sigma_max.
Index numerical_rank(const DenseMatrix& a, double rel_tol = 1e-10);

// Row-major flattening used for matrix-valued parameters: entry (i, j) of a
// rows x cols matrix sits at index i * cols + j.
DenseVector flatten(const DenseMatrix& a);
DenseMatrix unflatten(const DenseVector& x, Index rows, Index cols);

}  // namespace sparse_polyak

#endif  // SPARSE_POLYAK_CORE_H_
