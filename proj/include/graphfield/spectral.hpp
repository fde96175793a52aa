#pragma once

#include "graphfield/graph.hpp"
#include "graphfield/types.hpp"

#include <Eigen/SparseCholesky>

#include <optional>

namespace graphfield {

/// EmpiricalL2 declares orthonormality in <v,w> = (1/n) sum v_i w_i, the
/// inner product under which graph eigenvectors approximate continuum
/// eigenfunctions; Euclidean is the plain matrix convention.
enum class Normalization { EmpiricalL2, Euclidean };

struct EigenBasis {
  Vector values;   // ascending
  Matrix vectors;  // n x k, columns paired with values
  Normalization normalization = Normalization::Euclidean;

  Index count() const { return values.size(); }
  Index dim() const { return vectors.rows(); }
};

enum class EigsMethod { Auto, Dense, Lanczos };

struct EigsOptions {
  EigsMethod method = EigsMethod::Auto;
  std::uint64_t seed = 0;          // start-vector stream
  double tol = 1e-8;               // residual tolerance, relative to 1+|lambda|
  Index max_matvecs = 0;           // 0 = heuristic cap
  Index dense_threshold = 2048;    // Auto switches to Lanczos above this
};

/// k algebraically smallest eigenpairs of a symmetric PSD sparse matrix.
/// Dense solve up to opts.dense_threshold, otherwise shift-invert Lanczos
/// with full reorthogonalization and deflation of converged pairs.
/// Eigenvector signs are fixed (largest-magnitude entry positive).
EigenBasis eigs_smallest(const SpMat& A, Index k,
                         Normalization norm = Normalization::Euclidean,
                         const EigsOptions& opts = {});

EigenBasis eigs_smallest(const SparseSymmetric& A, Index k,
                         Normalization norm = Normalization::Euclidean,
                         const EigsOptions& opts = {});

/// Convert an EigenBasis between normalizations (vectors scaled by sqrt n).
EigenBasis renormalize(const EigenBasis& basis, Normalization target);

/// Sparse Cholesky A = R^T R (R upper triangular after the fill-reducing
/// AMD permutation). Supports solves with A, R and R^T, and log det A.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const SpMat& A);
  explicit CholeskyFactor(const SparseSymmetric& A);

  Index size() const { return n_; }

  Vector solve(const Vector& b) const;          // A^{-1} b
  Vector solve_upper(const Vector& b) const;    // R^{-1} b
  Vector multiply_upper_t(const Vector& b) const;  // R^T b

  double log_det() const;  // log det A

 private:
  void factorize(const SpMat& A);

  Index n_ = 0;
  Eigen::SimplicialLLT<SpMat> llt_;
};

CholeskyFactor cholesky(const SparseSymmetric& A);

double logdet(const CholeskyFactor& factor);

/// Effective dimension from Weyl-law growth: least-squares slope b of
/// log(lambda_i) vs log(i) over 1-based indices [i_lo, i_hi] gives
/// m_eff = 2 / b. The range must exclude zero eigenvalues and span at
/// least 5 points.
double effective_dimension(const EigenBasis& basis, Index i_lo, Index i_hi);

}  // namespace graphfield
