#include "graphfield/matern.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace graphfield {

namespace {

constexpr Index kDenseCovarianceCap = 8192;

bool is_integer(double s) { return s == std::floor(s); }

void check_model(const MaternModel& model) {
  if (model.tau.size() != model.n() || model.kappa.size() != model.n())
    throw std::invalid_argument("matern model: vector size mismatch");
  if ((model.tau.array() <= 0.0).any())
    throw std::invalid_argument("matern model: tau must be positive");
  if ((model.kappa.array() <= 0.0).any())
    throw std::invalid_argument("matern model: kappa must be positive");
  if (model.s <= 0.0) throw std::invalid_argument("matern model: s must be > 0");
  if (model.m < 1.0) throw std::invalid_argument("matern model: m must be >= 1");
}

SparseSymmetric from_sparse(const SpMat& A) {
  std::vector<SparseSymmetric::Entry> entries;
  entries.reserve(static_cast<std::size_t>(A.nonZeros() / 2 + A.rows()));
  for (Index c = 0; c < A.outerSize(); ++c)
    for (SpMat::InnerIterator it(A, c); it; ++it)
      if (it.row() <= it.col() && it.value() != 0.0)
        entries.push_back({it.row(), it.col(), it.value()});
  return SparseSymmetric(A.rows(), std::move(entries));
}

}  // namespace

Vector MaternModel::prefactor() const {
  return tau.array().pow(0.5 * s - 0.25 * m) * kappa.array().pow(0.25 * m);
}

MaternModel make_model(Laplacian laplacian, Vector tau, double s, double m,
                       Vector kappa) {
  const Index n = laplacian.size();
  if (kappa.size() == 0) kappa = Vector::Ones(n);
  MaternModel model{std::move(laplacian), std::move(tau), std::move(kappa), s,
                    m};
  check_model(model);
  return model;
}

MaternModel make_model(Laplacian laplacian, double tau_const, double s,
                       double m) {
  const Index n = laplacian.size();
  return make_model(std::move(laplacian), Vector::Constant(n, tau_const), s,
                    m);
}

SparseSymmetric operator_matrix(const MaternModel& model) {
  check_model(model);
  SpMat B = model.laplacian.matrix();
  for (Index i = 0; i < model.n(); ++i) B.coeffRef(i, i) += model.tau[i];
  return from_sparse(B);
}

SparseSymmetric precision(const MaternModel& model) {
  check_model(model);
  if (!is_integer(model.s) || model.s < 1.0 || model.s > 4.0)
    throw std::invalid_argument(
        "precision: sparse precision requires integer s in {1,2,3,4}; use the "
        "spectral path for fractional s");
  const auto p = static_cast<int>(model.s);
  SpMat B = operator_matrix(model).matrix();
  SpMat Bs = B;
  for (int i = 1; i < p; ++i) Bs = (Bs * B).pruned();
  const Vector inv_pre = model.prefactor().cwiseInverse();
  SpMat Q = inv_pre.asDiagonal() * Bs * inv_pre.asDiagonal();
  // round trips through products can leave tiny asymmetries; re-symmetrize
  SpMat Qs = 0.5 * (Q + SpMat(Q.transpose()));
  return from_sparse(Qs);
}

FieldSample sample_cholesky(const MaternModel& model, Rng& rng) {
  check_model(model);
  if (!is_integer(model.s) || model.s < 1.0)
    throw std::invalid_argument("sample_cholesky: requires integer s >= 1");
  const auto s_int = static_cast<Index>(model.s);
  const SparseSymmetric B = operator_matrix(model);
  CholeskyFactor factor(B);
  Vector w = rng.normal_vector(model.n());
  if (s_int % 2 == 1) w = factor.solve_upper(w);  // covariance B^{-1}
  for (Index p = 0; p < s_int / 2; ++p) w = factor.solve(w);
  FieldSample out;
  out.seed = rng.seed();
  out.values = model.prefactor().asDiagonal() * w;
  return out;
}

FieldSample sample_spectral(const MaternModel& model, const EigenBasis& basis,
                            std::optional<Index> k_trunc, Rng& rng) {
  check_model(model);
  const Index k = k_trunc.value_or(basis.count());
  if (k < 1 || k > basis.count())
    throw std::invalid_argument(
        "sample_spectral: truncation exceeds available eigenpairs");
  const EigenBasis euclid = renormalize(basis, Normalization::Euclidean);
  Vector coeff(k);
  for (Index i = 0; i < k; ++i)
    coeff[i] = std::pow(euclid.values[i], -0.5 * model.s) * rng.normal();
  FieldSample out;
  out.seed = rng.seed();
  out.truncation = k;
  out.values = model.prefactor().asDiagonal() *
               (euclid.vectors.leftCols(k) * coeff);
  return out;
}

FieldSample sample_spectral(const MaternModel& model,
                            std::optional<Index> k_trunc, Rng& rng) {
  const Index k = k_trunc.value_or(model.n());
  EigenBasis basis = eigs_smallest(operator_matrix(model), k);
  return sample_spectral(model, basis, k, rng);
}

Matrix covariance_matrix(const MaternModel& model,
                         std::optional<Index> k_trunc) {
  check_model(model);
  const Index n = model.n();
  if (n > kDenseCovarianceCap)
    throw std::invalid_argument(
        "covariance_matrix: n exceeds the dense cap (" +
        std::to_string(kDenseCovarianceCap) + "); use marginal_variances");
  const Index k = k_trunc.value_or(n);
  if (k < 1 || k > n)
    throw std::invalid_argument("covariance_matrix: bad truncation");
  EigenBasis basis = eigs_smallest(operator_matrix(model), n,
                                   Normalization::Euclidean,
                                   {.method = EigsMethod::Dense});
  const Vector pre = model.prefactor();
  Matrix scaled = basis.vectors.leftCols(k);
  for (Index i = 0; i < k; ++i)
    scaled.col(i) *= std::pow(basis.values[i], -0.5 * model.s);
  Matrix C = scaled * scaled.transpose();
  return pre.asDiagonal() * C * pre.asDiagonal();
}

Vector marginal_variances(const MaternModel& model) {
  check_model(model);
  const Index n = model.n();
  EigenBasis basis = eigs_smallest(operator_matrix(model), n,
                                   Normalization::Euclidean,
                                   {.method = EigsMethod::Dense});
  const Vector pre = model.prefactor();
  Vector var = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double w = std::pow(basis.values[i], -model.s);
    var += w * basis.vectors.col(i).cwiseAbs2();
  }
  return pre.cwiseAbs2().asDiagonal() * var;
}

void write_field_csv(const FieldSample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << std::setprecision(17);
  for (Index i = 0; i < sample.values.size(); ++i)
    out << i << "," << sample.values[i] << "\n";
}

}  // namespace graphfield
