#include "graphfield/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace graphfield {

namespace {

void fix_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      if (a > best) {  // strict: ties keep the lower index
        best = a;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

EigenBasis dense_smallest(const SpMat& A, Index k) {
  Matrix dense(A);
  // symmetrize against stray asymmetric rounding in assembly
  dense = 0.5 * (dense + dense.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
  if (es.info() != Eigen::Success)
    throw SolverError("dense eigensolver failed");
  EigenBasis basis;
  basis.values = es.eigenvalues().head(k);
  basis.vectors = es.eigenvectors().leftCols(k);
  return basis;
}

struct LanczosState {
  Matrix locked_vecs;   // n x locked
  std::vector<double> locked_vals;
};

// Shift-invert Lanczos with full reorthogonalization. A single Krylov
// sweep cannot produce two copies of a degenerate eigenvalue, so converged
// pairs are locked and fresh random restarts pick up the remaining
// directions of each eigengroup.
EigenBasis lanczos_smallest(const SpMat& A, Index k, const EigsOptions& opts) {
  const Index n = A.rows();
  const double diag_scale =
      std::max(1e-30, Matrix(A.diagonal()).cwiseAbs().mean());
  double shift = 1e-8 * diag_scale;

  SpMat ident(n, n);
  ident.setIdentity();
  Eigen::SimplicialLLT<SpMat> op;
  for (int attempt = 0;; ++attempt) {
    op.compute(A + shift * ident);
    if (op.info() == Eigen::Success) break;
    if (attempt >= 6)
      throw SolverError("lanczos: could not factorize shifted operator");
    shift *= 100.0;
  }

  const double tol = opts.tol;
  const Index cap_matvecs =
      opts.max_matvecs > 0 ? opts.max_matvecs
                           : std::max<Index>(400 * k, 4000);
  Index matvecs = 0;

  LanczosState st;
  st.locked_vecs.resize(n, 0);
  Rng rng(opts.seed ^ 0x5eedf00dull);

  auto orth_against_locked = [&](Vector& v) {
    if (st.locked_vecs.cols() > 0)
      v -= st.locked_vecs * (st.locked_vecs.transpose() * v);
  };

  double worst_residual = 0.0;

  // One deflated Krylov sweep from a fresh random start; locks up to
  // `want` converged pairs and returns how many it locked.
  auto run_sweep = [&](Index want) -> Index {
    const Index basis_cap =
        std::min<Index>(n, std::max<Index>(2 * want + 40, 60));
    Matrix Q(n, basis_cap);
    std::vector<double> alpha, beta;
    Vector q = rng.normal_vector(n);
    orth_against_locked(q);
    if (q.norm() < 1e-12) return 0;
    q.normalize();
    Q.col(0) = q;

    Index m = 0;
    for (Index j = 0; j < basis_cap; ++j) {
      Vector w = op.solve(Q.col(j));
      ++matvecs;
      const double a = Q.col(j).dot(w);
      alpha.push_back(a);
      w -= a * Q.col(j);
      if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * Q.col(j - 1);
      // full reorthogonalization, twice through locked + current basis
      for (int pass = 0; pass < 2; ++pass) {
        orth_against_locked(w);
        w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
      }
      const double b = w.norm();
      m = j + 1;
      if (b < 1e-13 || j + 1 == basis_cap) break;
      beta.push_back(b);
      Q.col(j + 1) = w / b;
    }

    Matrix T = Matrix::Zero(m, m);
    for (Index r = 0; r < m; ++r) {
      T(r, r) = alpha[static_cast<std::size_t>(r)];
      if (r + 1 < m) {
        T(r, r + 1) = beta[static_cast<std::size_t>(r)];
        T(r + 1, r) = beta[static_cast<std::size_t>(r)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> small(T);

    // Largest Ritz values of (A + shift I)^{-1} approximate the smallest
    // eigenvalues of A. Walk them in descending order and lock converged.
    Index locked_here = 0;
    for (Index c = m - 1; c >= 0 && locked_here < want; --c) {
      Vector x = Q.leftCols(m) * small.eigenvectors().col(c);
      const double xn = x.norm();
      if (xn < 1e-12) continue;
      x /= xn;
      const double lambda = x.dot(A * x);
      const double resid = (A * x - lambda * x).norm();
      worst_residual = resid;
      if (resid <= tol * (1.0 + std::abs(lambda))) {
        st.locked_vecs.conservativeResize(n, st.locked_vecs.cols() + 1);
        st.locked_vecs.col(st.locked_vecs.cols() - 1) = x;
        st.locked_vals.push_back(lambda);
        ++locked_here;
      } else {
        break;  // Ritz values below this one are even less converged
      }
    }
    return locked_here;
  };

  int sweeps_without_progress = 0;
  while (static_cast<Index>(st.locked_vals.size()) < k) {
    if (matvecs >= cap_matvecs || sweeps_without_progress > 4) {
      std::ostringstream msg;
      msg << "lanczos did not converge: " << st.locked_vals.size() << "/" << k
          << " eigenpairs after " << matvecs
          << " operator applications (last residual " << worst_residual << ")";
      throw SolverError(msg.str());
    }
    const Index got = run_sweep(k - static_cast<Index>(st.locked_vals.size()));
    sweeps_without_progress = got == 0 ? sweeps_without_progress + 1 : 0;
  }

  // A single Krylov sweep sees one direction per eigenspace, so a copy of
  // a degenerate eigenvalue can in principle be missed. Verify with extra
  // deflated sweeps: nothing new may converge below the current k-th value.
  for (int pass = 0; pass < 3 && matvecs < cap_matvecs; ++pass) {
    std::vector<double> sorted_vals = st.locked_vals;
    std::sort(sorted_vals.begin(), sorted_vals.end());
    const double kth = sorted_vals[static_cast<std::size_t>(k - 1)];
    const std::size_t before = st.locked_vals.size();
    if (run_sweep(2) == 0) break;
    double new_min = st.locked_vals[before];
    for (std::size_t i = before; i < st.locked_vals.size(); ++i)
      new_min = std::min(new_min, st.locked_vals[i]);
    if (new_min >= kth - 1e-10 * (1.0 + std::abs(kth))) break;
  }

  std::vector<Index> order(st.locked_vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return st.locked_vals[static_cast<std::size_t>(a)] <
           st.locked_vals[static_cast<std::size_t>(b)];
  });

  EigenBasis basis;
  basis.values.resize(k);
  basis.vectors.resize(n, k);
  for (Index c = 0; c < k; ++c) {
    const auto idx = static_cast<std::size_t>(order[static_cast<std::size_t>(c)]);
    basis.values[c] = st.locked_vals[idx];
    basis.vectors.col(c) = st.locked_vecs.col(static_cast<Index>(idx));
  }
  return basis;
}

}  // namespace

EigenBasis eigs_smallest(const SpMat& A, Index k, Normalization norm,
                         const EigsOptions& opts) {
  const Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("eigs_smallest: not square");
  if (k < 1 || k > n)
    throw std::invalid_argument("eigs_smallest: require 1 <= k <= n");

  const bool dense = opts.method == EigsMethod::Dense ||
                     (opts.method == EigsMethod::Auto &&
                      n <= opts.dense_threshold);
  EigenBasis basis = dense ? dense_smallest(A, k) : lanczos_smallest(A, k, opts);
  fix_signs(basis.vectors);
  basis.normalization = Normalization::Euclidean;
  if (norm == Normalization::EmpiricalL2) {
    basis.vectors *= std::sqrt(static_cast<double>(n));
    basis.normalization = Normalization::EmpiricalL2;
  }
  return basis;
}

EigenBasis eigs_smallest(const SparseSymmetric& A, Index k, Normalization norm,
                         const EigsOptions& opts) {
  return eigs_smallest(A.matrix(), k, norm, opts);
}

EigenBasis renormalize(const EigenBasis& basis, Normalization target) {
  if (basis.normalization == target) return basis;
  EigenBasis out = basis;
  const double root_n = std::sqrt(static_cast<double>(basis.dim()));
  out.vectors = target == Normalization::EmpiricalL2
                    ? (basis.vectors * root_n).eval()
                    : (basis.vectors / root_n).eval();
  out.normalization = target;
  return out;
}

namespace {

// Best-effort pivot detection for error reporting when the sparse
// factorization rejects the matrix.
Index find_bad_pivot(const SpMat& A) {
  const Index n = A.rows();
  if (n > 2048) return -1;
  Matrix M(A);
  for (Index j = 0; j < n; ++j) {
    double d = M(j, j);
    for (Index p = 0; p < j; ++p) d -= M(j, p) * M(j, p);
    if (!(d > 0.0)) return j;
    M(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      double v = M(i, j);
      for (Index p = 0; p < j; ++p) v -= M(i, p) * M(j, p);
      M(i, j) = v / M(j, j);
    }
  }
  return -1;
}

}  // namespace

CholeskyFactor::CholeskyFactor(const SpMat& A) { factorize(A); }

CholeskyFactor::CholeskyFactor(const SparseSymmetric& A) {
  factorize(A.matrix());
}

void CholeskyFactor::factorize(const SpMat& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("cholesky: matrix not square");
  n_ = A.rows();
  llt_.compute(A);
  if (llt_.info() != Eigen::Success) {
    const Index pivot = find_bad_pivot(A);
    throw FactorizationError(
        "cholesky: matrix is not positive definite (pivot " +
            std::to_string(pivot) + ")",
        pivot);
  }
}

Vector CholeskyFactor::solve(const Vector& b) const {
  if (b.size() != n_) throw std::invalid_argument("cholesky solve: dim");
  return llt_.solve(b);
}

Vector CholeskyFactor::solve_upper(const Vector& b) const {
  if (b.size() != n_) throw std::invalid_argument("cholesky solve: dim");
  // A = R^T R with R = L^T P: R^{-1} b = P^{-1} L^{-T} b
  Vector y = llt_.matrixU().solve(b);
  return llt_.permutationPinv() * y;
}

Vector CholeskyFactor::multiply_upper_t(const Vector& b) const {
  if (b.size() != n_) throw std::invalid_argument("cholesky multiply: dim");
  // R^T b = P^{-1} (L b)
  Vector y = llt_.matrixL() * b;
  return llt_.permutationPinv() * y;
}

double CholeskyFactor::log_det() const {
  SpMat L = llt_.matrixL();
  double acc = 0.0;
  for (Index i = 0; i < n_; ++i) acc += std::log(L.coeff(i, i));
  return 2.0 * acc;
}

CholeskyFactor cholesky(const SparseSymmetric& A) { return CholeskyFactor(A); }

double logdet(const CholeskyFactor& factor) { return factor.log_det(); }

double effective_dimension(const EigenBasis& basis, Index i_lo, Index i_hi) {
  if (i_lo < 1 || i_hi > basis.count() || i_hi - i_lo + 1 < 5)
    throw std::invalid_argument(
        "effective_dimension: need a 1-based range of at least 5 eigenvalues");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(i_hi - i_lo + 1);
  for (Index i = i_lo; i <= i_hi; ++i) {
    const double lam = basis.values[i - 1];
    if (lam <= 0.0)
      throw std::invalid_argument(
          "effective_dimension: nonpositive eigenvalue in range");
    const double x = std::log(static_cast<double>(i));
    const double y = std::log(lam);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  if (slope <= 0.0)
    throw std::invalid_argument("effective_dimension: nonpositive slope");
  return 2.0 / slope;
}

}  // namespace graphfield
