#pragma once

#include "graphfield/pointcloud.hpp"
#include "graphfield/types.hpp"

#include <string>
#include <vector>

namespace graphfield {

/// Symmetric sparse matrix stored once per unordered pair (i <= j).
/// Immutable after construction; the assembled Eigen matrix mirrors the
/// triplets symmetrically.
class SparseSymmetric {
 public:
  struct Entry {
    Index i, j;  // i <= j
    double value;
  };

  SparseSymmetric() = default;
  SparseSymmetric(Index n, std::vector<Entry> entries);

  Index size() const { return n_; }
  const std::vector<Entry>& entries() const { return entries_; }
  Index nonzero_count() const;  // counting both triangles

  /// True when the matrix has no off-diagonal entries (empty graph).
  bool no_edges() const;

  const SpMat& matrix() const { return mat_; }

  Vector row_sums() const;

  /// Matrix Market coordinate format, symmetric, 1-based indices.
  void write_matrix_market(const std::string& path) const;

 private:
  Index n_ = 0;
  std::vector<Entry> entries_;
  SpMat mat_;
};

enum class LaplacianKind { Unnormalized, Symmetric, RandomWalk };

/// Graph Laplacian with its degree vector. Unnormalized and Symmetric
/// kinds are symmetric matrices; RandomWalk is row-scaled.
class Laplacian {
 public:
  Laplacian(LaplacianKind kind, SpMat matrix, Vector degrees)
      : kind_(kind), mat_(std::move(matrix)), degrees_(std::move(degrees)) {}

  LaplacianKind kind() const { return kind_; }
  Index size() const { return mat_.rows(); }
  const SpMat& matrix() const { return mat_; }
  const Vector& degrees() const { return degrees_; }

 private:
  LaplacianKind kind_;
  SpMat mat_;
  Vector degrees_;
};

/// Epsilon-graph weights 2(m+2)·vol / (n·nu_m·h^{m+2}) on pairs closer
/// than h (strict). vol rescales for manifolds of non-unit volume.
SparseSymmetric epsilon_weights(const PointCloud& cloud, double h, int m,
                                double vol = 1.0);

/// Same support as epsilon_weights with each entry scaled by
/// sqrt(kappa_i * kappa_j); discretizes -div(kappa grad).
SparseSymmetric kappa_weights(const PointCloud& cloud, double h, int m,
                              double vol, const Vector& kappa);

/// Scale an already-built weight matrix by sqrt(kappa_i * kappa_j).
SparseSymmetric kappa_scale(const SparseSymmetric& weights,
                            const Vector& kappa);

/// Density-corrected weights (m+2)/(n nu_m h^{m+2}) * [q(x_i)^{-1} +
/// q(x_j)^{-1}] with q the indicator kernel density estimate (self-count
/// included so q > 0 even at isolated nodes).
SparseSymmetric density_corrected_weights(const PointCloud& cloud, double h,
                                          int m);

/// Self-tuning Gaussian weights exp(-|x_i-x_j|^2 / (2 delta_i delta_j))
/// on the symmetrized k-NN relation.
SparseSymmetric selftuning_knn_weights(const PointCloud& cloud, Index k);

/// Gaussian kernel of recorded pairwise distances, bandwidth = mean
/// recorded distance.
SparseSymmetric distance_gaussian_weights(const EdgeListInput& input);

Laplacian laplacian(const SparseSymmetric& weights, LaplacianKind kind);

/// u^T L u. For the unnormalized kind equals the weighted edge sum
/// (1/2) sum_ij W_ij (u_i - u_j)^2.
double quadratic_form(const Laplacian& lap, const Vector& u);

}  // namespace graphfield
