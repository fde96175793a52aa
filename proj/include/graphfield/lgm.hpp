#pragma once

#include "graphfield/matern.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace graphfield {

/// Truncated Karhunen-Loeve hyperprior for a log length-scale field:
/// log tau(theta) = scale * nu^{s0/2 - m/4} * sum_{i<=n0}
/// (nu + lambda_i)^{-s0/2} theta_i psi_i, theta ~ N(0, I_{n0}).
struct HyperKL {
  enum class Target { Tau, Kappa };

  double nu = 1.0;
  double s0 = 1.0;
  Index n0 = 1;
  EigenBasis basis;  // >= n0 EmpiricalL2 eigenpairs of the graph Laplacian
  double m = 2.0;
  Target target = Target::Tau;
  double scale = 1.0;  // KL prefactor multiplier, see scale_hyper
};

HyperKL make_hyper(double nu, double s0, Index n0, EigenBasis basis, double m,
                   HyperKL::Target target = HyperKL::Target::Tau);

/// The positive length-scale field exp(KL(theta)).
Vector tau_from_theta(const HyperKL& hyper, const Vector& theta);

/// Root-mean-square prior std of log tau over nodes at scale = 1.
double hyper_base_std(const HyperKL& hyper);

/// Scale factor making the prior std of log tau equal |log target_scale|;
/// target defaults to the n0-th eigenvalue of the Laplacian.
double scale_hyper(const HyperKL& hyper,
                   std::optional<double> target_scale = std::nullopt);

struct GaussianObs {
  IndexVector indices;  // distinct, in range
  Vector y;
  double sigma = 1.0;
};

GaussianObs make_gaussian_obs(IndexVector indices, Vector y, double sigma);

struct ProbitObs {
  IndexVector indices;
  Eigen::VectorXi labels;  // +/-1
  double sigma = 0.1;
};

ProbitObs make_probit_obs(IndexVector indices, Eigen::VectorXi labels,
                          double sigma);

/// Latent Matern family over a fixed graph: theta parameterizes tau (the
/// Laplacian stays fixed) or kappa (the Laplacian is rebuilt with
/// kappa-scaled weights).
struct LatentFamily {
  SparseSymmetric weights;
  LaplacianKind kind = LaplacianKind::Unnormalized;
  Laplacian base_laplacian;
  HyperKL hyper;
  double s = 2.0;
  double m = 2.0;

  Index n() const { return weights.size(); }

  MaternModel model_at(const Vector& theta) const { return model_at(theta, s); }
  MaternModel model_at(const Vector& theta, double s_use) const;
};

LatentFamily make_family(SparseSymmetric weights, LaplacianKind kind,
                         HyperKL hyper, double s, double m);

/// Q(theta, s) behind a uniform interface: sparse for integer s in
/// {1,...,4}, dense through the eigendecomposition of B otherwise.
class LatentPrecision {
 public:
  explicit LatentPrecision(const MaternModel& model);

  Index n() const { return n_; }
  double log_det() const { return logdet_; }
  Vector apply(const Vector& u) const;  // Q u
  double quad(const Vector& u) const;   // u^T Q u
  Vector noise(Rng& rng) const;         // draw with covariance Q

  /// Factorization of Q + diag(add).
  class Shifted {
   public:
    Vector solve(const Vector& b) const;
    double log_det() const;

   private:
    friend class LatentPrecision;
    std::optional<CholeskyFactor> sparse_;
    std::optional<Eigen::LLT<Matrix>> dense_;
  };

  Shifted shifted(const Vector& diag_add) const;

 private:
  Index n_ = 0;
  bool dense_path_ = false;
  double s_ = 2.0;
  Vector prefactor_;
  double logdet_ = 0.0;
  // sparse path
  SpMat B_;
  std::optional<CholeskyFactor> B_factor_;
  SpMat Q_sparse_;
  // dense path
  Matrix Q_dense_;
  Matrix B_vectors_;
  Vector B_values_;
};

/// Centered, rescaled observations so that |y| matches the prior scale
/// E|u_n|^2 of the latent field at theta = 0 (estimated by prior draws
/// restricted to the observed nodes).
struct NormalizedData {
  Vector y;       // transformed values
  double center;  // original mean
  double factor;  // y_norm = factor * (y_raw - center)
  double prior_mean_square;

  double to_raw(double v) const { return v / factor + center; }
  double var_to_raw(double v) const { return v / (factor * factor); }
};

NormalizedData normalize_observations(const Vector& y,
                                      const LatentFamily& family,
                                      const IndexVector& obs_indices,
                                      Index n_draws = 100,
                                      std::uint64_t seed = 0);

/// Exact draw of u | theta, y for the Gaussian likelihood via the
/// normal-equation route: (sigma^{-2} S^T S + Q) u = sigma^{-2} S^T y +
/// sigma^{-1} S^T xi_1 + R^T xi_2 with Q = R^T R.
Vector conditional_gaussian_sample(const LatentPrecision& precision,
                                   const GaussianObs& obs, Rng& rng);

/// log pi(theta | u) up to a constant:
/// (1/2) logdet Q(theta) - (1/2) u^T Q(theta) u - (1/2)|theta|^2.
double log_post_theta(const LatentFamily& family, const Vector& theta,
                      const Vector& u);

struct GibbsOptions {
  Index steps = 1000;
  double beta_theta = 0.5;
  Index burn_in = 0;      // states excluded from stored u history
  bool store_u = true;
  bool store_tau = true;
};

struct GibbsChain {
  Matrix thetas;       // steps x n0
  Matrix u_history;    // (steps - burn_in) x n, empty unless store_u
  Matrix tau_history;  // (steps - burn_in) x n, empty unless store_tau
  Vector accept_rate;  // per theta coordinate
  bool aborted = false;
  std::string abort_reason;
  Index completed_steps = 0;
};

/// Alternating exact u-draw and coordinatewise random-walk Metropolis on
/// theta.
GibbsChain gibbs_chain(const LatentFamily& family, const GaussianObs& obs,
                       const GibbsOptions& opts, Rng& rng);

struct HyperPriors {
  double log_sigma_mean = std::log(0.01);
  double log_sigma_sd = 1.0;
  double log_s_mean = std::log(2.0);
  double log_s_sd = 1.0;
};

/// log N(log sigma; ...) + log N(log s; ...) + log N(theta; 0, I), up to
/// additive constants; the s term is dropped when s is fixed.
double log_hyper_prior(const HyperPriors& priors, double sigma,
                       std::optional<double> s, const Vector& theta);

/// Marginal log posterior of (sigma, s, theta) for the Gaussian
/// likelihood, up to a constant.
double log_marginal_gaussian(double sigma, double s_use, const Vector& theta,
                             const LatentFamily& family,
                             const IndexVector& obs_indices, const Vector& y,
                             const HyperPriors& priors, bool s_inferred);

struct Predictive {
  Vector mean;  // all nodes
  Vector var;   // all nodes
};

/// Posterior Gaussian at fixed hyperparameters: mean by one solve,
/// marginal variances by per-column solves (O(n * n_solve) cost).
Predictive predictive_gaussian(double sigma, double s_use,
                               const Vector& theta, const LatentFamily& family,
                               const IndexVector& obs_indices,
                               const Vector& y);

/// Joint predictive covariance block on the given nodes.
Matrix predictive_cov_block(double sigma, double s_use, const Vector& theta,
                            const LatentFamily& family,
                            const IndexVector& obs_indices, const Vector& y,
                            const IndexVector& block);

struct NelderMeadOptions {
  Index max_evals = 2000;
  double simplex_tol = 1e-6;
  double init_step = 0.5;
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  Index evals = 0;
  bool converged = false;
  std::vector<double> trace;  // best value after each iteration
};

/// Derivative-free maximization (Nelder-Mead); deterministic given init.
NelderMeadResult optimize_evidence(
    const std::function<double(const Vector&)>& objective, const Vector& init,
    const NelderMeadOptions& opts = {});

/// Mode of the probit posterior by safeguarded Newton iterations.
struct ProbitMode {
  Vector u;
  Index iterations = 0;
  double grad_norm = 0.0;
};

ProbitMode probit_mode_newton(const LatentPrecision& precision,
                              const ProbitObs& obs);

/// Negative Hessian diagonal of the probit log likelihood at u, on the
/// observed nodes (zeros elsewhere).
Vector probit_hessian_diag(const Vector& u, const ProbitObs& obs);

/// Gradient of sum log Phi(y_i u_i / sigma) - (1/2) u^T Q u.
Vector probit_objective_gradient(const LatentPrecision& precision,
                                 const Vector& u, const ProbitObs& obs);

double probit_objective(const LatentPrecision& precision, const Vector& u,
                        const ProbitObs& obs);

/// Laplace-approximate marginal log posterior of the hyperparameters for
/// the probit likelihood, up to a constant.
double probit_laplace_evidence(double sigma, double s_use,
                               const Vector& theta, const LatentFamily& family,
                               const ProbitObs& obs,
                               const HyperPriors& priors, bool s_inferred);

/// sign(u) with zero mapped to +1.
Eigen::VectorXi classify(const Vector& u);

double score_rmse(const Vector& pred_mean, const Vector& y_test);

/// Closed-form CRPS of N(a, b^2) against observation y.
double score_crps_gaussian(double a, double b, double y);

/// Negative log density of the joint predictive Gaussian at y_test.
double score_ls(const Vector& mean, const Matrix& cov, const Vector& y_test);

}  // namespace graphfield
