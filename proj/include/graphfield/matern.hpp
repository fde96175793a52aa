#pragma once

#include "graphfield/graph.hpp"
#include "graphfield/spectral.hpp"
#include "graphfield/types.hpp"

#include <optional>
#include <string>

namespace graphfield {

/// Discrete Matern field model. The base operator is
/// B = diag(tau) + Delta with Delta the (possibly kappa-weighted) graph
/// Laplacian; smoothness s and effective dimension m fix the
/// marginal-variance prefactor diag(tau^{s/2 - m/4} kappa^{m/4}).
struct MaternModel {
  Laplacian laplacian;
  Vector tau;    // per node, >= tau_min > 0
  Vector kappa;  // per node, all ones unless the Laplacian is kappa-weighted
  double s = 2.0;
  double m = 2.0;

  Index n() const { return laplacian.size(); }

  /// tau^{s/2 - m/4} * kappa^{m/4}, the diagonal normalization.
  Vector prefactor() const;
};

MaternModel make_model(Laplacian laplacian, Vector tau, double s, double m,
                       Vector kappa = Vector());

MaternModel make_model(Laplacian laplacian, double tau_const, double s,
                       double m);

struct FieldSample {
  Vector values;
  std::uint64_t seed = 0;
  std::optional<Index> truncation;
};

/// B = diag(tau) + Delta, the strictly positive definite base operator.
SparseSymmetric operator_matrix(const MaternModel& model);

/// Q = D^{-1} B^s D^{-1} with D = diag(prefactor), for integer s in
/// {1,2,3,4}; fill grows quickly with s, fractional s goes through the
/// spectral path.
SparseSymmetric precision(const MaternModel& model);

/// Exact draw with covariance D B^{-s} D via the sparse factor of B.
/// Even s = 2p applies p solves; odd s = 2p+1 adds one half-solve against
/// the upper factor.
FieldSample sample_cholesky(const MaternModel& model, Rng& rng);

/// Karhunen-Loeve draw through the eigenpairs of B; supports fractional s
/// and truncation. Distributionally equal to sample_cholesky at
/// k_trunc = n and integer s.
FieldSample sample_spectral(const MaternModel& model,
                            std::optional<Index> k_trunc, Rng& rng);

/// As above but against a precomputed basis of B (saves the eigensolve
/// when drawing repeatedly).
FieldSample sample_spectral(const MaternModel& model, const EigenBasis& basis,
                            std::optional<Index> k_trunc, Rng& rng);

/// Dense covariance D [sum_{i<=k} lambda_i^{-s} v_i v_i^T] D; n capped at
/// 8192 (O(n^2) memory), use marginal_variances beyond that.
Matrix covariance_matrix(const MaternModel& model,
                         std::optional<Index> k_trunc = std::nullopt);

/// Diagonal of covariance_matrix without forming the full matrix.
Vector marginal_variances(const MaternModel& model);

void write_field_csv(const FieldSample& sample, const std::string& path);

}  // namespace graphfield
