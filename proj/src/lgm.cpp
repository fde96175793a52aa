#include "graphfield/lgm.hpp"
#include "graphfield/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace graphfield {

namespace {

bool is_small_integer(double s) {
  return s == std::floor(s) && s >= 1.0 && s <= 4.0;
}

Vector scatter(const IndexVector& indices, const Vector& values, Index n) {
  Vector out = Vector::Zero(n);
  for (Index a = 0; a < indices.size(); ++a) out[indices[a]] += values[a];
  return out;
}

Vector gather(const IndexVector& indices, const Vector& values) {
  Vector out(indices.size());
  for (Index a = 0; a < indices.size(); ++a) out[a] = values[indices[a]];
  return out;
}

void check_indices(const IndexVector& indices, Index n) {
  std::set<Index> seen;
  for (Index a = 0; a < indices.size(); ++a) {
    if (indices[a] < 0 || indices[a] >= n)
      throw std::invalid_argument("observation index out of range");
    if (!seen.insert(indices[a]).second)
      throw std::invalid_argument("duplicate observation index");
  }
}

}  // namespace

HyperKL make_hyper(double nu, double s0, Index n0, EigenBasis basis, double m,
                   HyperKL::Target target) {
  if (nu <= 0.0) throw std::invalid_argument("hyper: nu must be > 0");
  if (s0 <= 0.0) throw std::invalid_argument("hyper: s0 must be > 0");
  if (n0 < 1 || n0 > basis.count())
    throw std::invalid_argument("hyper: need 1 <= n0 <= basis count");
  HyperKL h;
  h.nu = nu;
  h.s0 = s0;
  h.n0 = n0;
  h.basis = renormalize(basis, Normalization::EmpiricalL2);
  h.m = m;
  h.target = target;
  return h;
}

Vector tau_from_theta(const HyperKL& hyper, const Vector& theta) {
  if (theta.size() != hyper.n0)
    throw std::invalid_argument("tau_from_theta: theta must have n0 entries");
  const double pref =
      hyper.scale * std::pow(hyper.nu, 0.5 * hyper.s0 - 0.25 * hyper.m);
  Vector log_tau = Vector::Zero(hyper.basis.dim());
  for (Index i = 0; i < hyper.n0; ++i)
    log_tau += pref *
               std::pow(hyper.nu + hyper.basis.values[i], -0.5 * hyper.s0) *
               theta[i] * hyper.basis.vectors.col(i);
  return log_tau.array().exp();
}

double hyper_base_std(const HyperKL& hyper) {
  // Var log tau at node j is pref^2 sum_i (nu+lambda_i)^{-s0} psi_i(j)^2;
  // averaging over nodes the EmpiricalL2 normalization collapses psi^2 to 1.
  const double pref = std::pow(hyper.nu, 0.5 * hyper.s0 - 0.25 * hyper.m);
  double acc = 0.0;
  for (Index i = 0; i < hyper.n0; ++i)
    acc += std::pow(hyper.nu + hyper.basis.values[i], -hyper.s0);
  return pref * std::sqrt(acc);
}

double scale_hyper(const HyperKL& hyper, std::optional<double> target_scale) {
  const double target =
      target_scale.value_or(hyper.basis.values[hyper.n0 - 1]);
  if (target <= 0.0)
    throw std::invalid_argument("scale_hyper: target scale must be positive");
  return std::abs(std::log(target)) / hyper_base_std(hyper);
}

GaussianObs make_gaussian_obs(IndexVector indices, Vector y, double sigma) {
  if (indices.size() != y.size())
    throw std::invalid_argument("gaussian obs: size mismatch");
  if (sigma <= 0.0) throw std::invalid_argument("gaussian obs: sigma <= 0");
  return GaussianObs{std::move(indices), std::move(y), sigma};
}

ProbitObs make_probit_obs(IndexVector indices, Eigen::VectorXi labels,
                          double sigma) {
  if (indices.size() != labels.size())
    throw std::invalid_argument("probit obs: size mismatch");
  if (sigma <= 0.0) throw std::invalid_argument("probit obs: sigma <= 0");
  for (Index a = 0; a < labels.size(); ++a)
    if (labels[a] != 1 && labels[a] != -1)
      throw std::invalid_argument("probit obs: labels must be +/-1");
  return ProbitObs{std::move(indices), std::move(labels), sigma};
}

MaternModel LatentFamily::model_at(const Vector& theta, double s_use) const {
  Vector field = tau_from_theta(hyper, theta);
  if (hyper.target == HyperKL::Target::Tau) {
    return make_model(base_laplacian, std::move(field), s_use, m);
  }
  // kappa target: rebuild the Laplacian with kappa-scaled weights,
  // tau pinned at 1, kappa entering the marginal-variance prefactor
  Laplacian lap = laplacian(kappa_scale(weights, field), kind);
  return make_model(std::move(lap), Vector::Ones(n()), s_use, m,
                    std::move(field));
}

LatentFamily make_family(SparseSymmetric weights, LaplacianKind kind,
                         HyperKL hyper, double s, double m) {
  Laplacian lap = laplacian(weights, kind);
  return LatentFamily{std::move(weights), kind, std::move(lap),
                      std::move(hyper), s, m};
}

LatentPrecision::LatentPrecision(const MaternModel& model)
    : n_(model.n()), s_(model.s), prefactor_(model.prefactor()) {
  const SparseSymmetric B = operator_matrix(model);
  B_ = B.matrix();
  B_factor_.emplace(B_);
  // logdet Q = -2 sum log prefactor + s logdet B, valid for all s
  logdet_ = -2.0 * prefactor_.array().log().sum() + s_ * B_factor_->log_det();
  dense_path_ = !is_small_integer(s_);
  if (!dense_path_) {
    Q_sparse_ = precision(model).matrix();
    return;
  }
  if (n_ > 8192)
    throw std::invalid_argument(
        "latent precision: fractional s needs a dense eigendecomposition, "
        "n too large");
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(B_));
  if (es.info() != Eigen::Success)
    throw SolverError("latent precision: eigendecomposition failed");
  B_vectors_ = es.eigenvectors();
  B_values_ = es.eigenvalues();
  if ((B_values_.array() <= 0.0).any())
    throw FactorizationError("latent precision: operator not PD", -1);
  const Vector inv_pre = prefactor_.cwiseInverse();
  Matrix scaled = B_vectors_;
  for (Index i = 0; i < n_; ++i)
    scaled.col(i) *= std::pow(B_values_[i], 0.5 * s_);
  Q_dense_ = scaled * scaled.transpose();
  Q_dense_ = inv_pre.asDiagonal() * Q_dense_ * inv_pre.asDiagonal();
  Q_dense_ = 0.5 * (Q_dense_ + Q_dense_.transpose()).eval();
}

Vector LatentPrecision::apply(const Vector& u) const {
  if (u.size() != n_) throw std::invalid_argument("precision apply: dim");
  if (dense_path_) return Q_dense_ * u;
  return Q_sparse_ * u;
}

double LatentPrecision::quad(const Vector& u) const { return u.dot(apply(u)); }

Vector LatentPrecision::noise(Rng& rng) const {
  Vector xi = rng.normal_vector(n_);
  if (dense_path_) {
    // D^{-1} V Lambda^{s/2} V^T xi has covariance Q
    Vector w = B_vectors_.transpose() * xi;
    for (Index i = 0; i < n_; ++i) w[i] *= std::pow(B_values_[i], 0.5 * s_);
    return prefactor_.cwiseInverse().asDiagonal() * (B_vectors_ * w);
  }
  const auto s_int = static_cast<Index>(s_);
  Vector w = xi;
  if (s_int % 2 == 1) w = B_factor_->multiply_upper_t(w);
  for (Index p = 0; p < s_int / 2; ++p) w = B_ * w;
  return prefactor_.cwiseInverse().asDiagonal() * w;
}

LatentPrecision::Shifted LatentPrecision::shifted(const Vector& diag_add) const {
  if (diag_add.size() != n_) throw std::invalid_argument("shifted: dim");
  Shifted out;
  if (dense_path_) {
    Matrix Qt = Q_dense_;
    Qt.diagonal() += diag_add;
    out.dense_.emplace(Qt);
    if (out.dense_->info() != Eigen::Success)
      throw FactorizationError("shifted precision not PD", -1);
  } else {
    SpMat Qt = Q_sparse_;
    for (Index i = 0; i < n_; ++i)
      if (diag_add[i] != 0.0) Qt.coeffRef(i, i) += diag_add[i];
    out.sparse_.emplace(Qt);
  }
  return out;
}

Vector LatentPrecision::Shifted::solve(const Vector& b) const {
  if (sparse_) return sparse_->solve(b);
  return dense_->solve(b);
}

double LatentPrecision::Shifted::log_det() const {
  if (sparse_) return sparse_->log_det();
  return 2.0 * dense_->matrixLLT().diagonal().array().log().sum();
}

NormalizedData normalize_observations(const Vector& y,
                                      const LatentFamily& family,
                                      const IndexVector& obs_indices,
                                      Index n_draws, std::uint64_t seed) {
  check_indices(obs_indices, family.n());
  if (y.size() != obs_indices.size())
    throw std::invalid_argument("normalize_observations: size mismatch");
  // Prior scale at theta = 0 (tau == 1). The estimate uses the nearest
  // integer smoothness so the draws go through the sparse factor.
  const double s_est = std::clamp(std::round(family.s), 1.0, 4.0);
  MaternModel model = family.model_at(Vector::Zero(family.hyper.n0), s_est);
  Rng rng = Rng(seed).derive(0x9072a11ull);
  double acc = 0.0;
  for (Index d = 0; d < n_draws; ++d) {
    FieldSample sample = sample_cholesky(model, rng);
    acc += gather(obs_indices, sample.values).squaredNorm();
  }
  const double prior_ms = acc / static_cast<double>(n_draws);

  NormalizedData out;
  out.center = y.mean();
  Vector centered = y.array() - out.center;
  const double data_ms = centered.squaredNorm();
  if (data_ms <= 0.0)
    throw std::invalid_argument("normalize_observations: constant data");
  out.factor = std::sqrt(prior_ms / data_ms);
  out.y = out.factor * centered;
  out.prior_mean_square = prior_ms;
  return out;
}

Vector conditional_gaussian_sample(const LatentPrecision& precision,
                                   const GaussianObs& obs, Rng& rng) {
  const Index n = precision.n();
  check_indices(obs.indices, n);
  const double inv_s2 = 1.0 / (obs.sigma * obs.sigma);
  Vector diag_add = scatter(obs.indices, Vector::Constant(obs.indices.size(), inv_s2), n);
  auto tilde = precision.shifted(diag_add);
  Vector xi1 = rng.normal_vector(obs.indices.size());
  Vector rhs = scatter(obs.indices, (inv_s2 * obs.y + xi1 / obs.sigma).eval(), n);
  rhs += precision.noise(rng);
  return tilde.solve(rhs);
}

double log_post_theta(const LatentFamily& family, const Vector& theta,
                      const Vector& u) {
  LatentPrecision precision(family.model_at(theta));
  return 0.5 * precision.log_det() - 0.5 * precision.quad(u) -
         0.5 * theta.squaredNorm();
}

GibbsChain gibbs_chain(const LatentFamily& family, const GaussianObs& obs,
                       const GibbsOptions& opts, Rng& rng) {
  if (opts.steps < 1) throw std::invalid_argument("gibbs: steps must be >= 1");
  if (opts.beta_theta < 0.0)
    throw std::invalid_argument("gibbs: beta_theta must be >= 0");
  const Index n = family.n();
  const Index n0 = family.hyper.n0;
  check_indices(obs.indices, n);

  GibbsChain chain;
  chain.thetas.resize(opts.steps, n0);
  const Index kept = std::max<Index>(opts.steps - opts.burn_in, 0);
  if (opts.store_u) chain.u_history.resize(kept, n);
  if (opts.store_tau) chain.tau_history.resize(kept, n);
  chain.accept_rate = Vector::Zero(n0);

  Vector theta = Vector::Zero(n0);
  Vector u = Vector::Zero(n);
  try {
    for (Index step = 0; step < opts.steps; ++step) {
      // (a) exact conditional draw of u given theta
      LatentPrecision precision(family.model_at(theta));
      u = conditional_gaussian_sample(precision, obs, rng);

      // (b) coordinatewise Metropolis on theta given u
      double current = 0.5 * precision.log_det() - 0.5 * precision.quad(u) -
                       0.5 * theta.squaredNorm();
      for (Index j = 0; j < n0; ++j) {
        Vector proposal = theta;
        proposal[j] += opts.beta_theta * rng.normal();
        const double prop_val = log_post_theta(family, proposal, u);
        const double log_alpha = prop_val - current;
        if (std::log(std::max(rng.uniform(), 1e-300)) < log_alpha) {
          theta = proposal;
          current = prop_val;
          chain.accept_rate[j] += 1.0;
        }
      }

      chain.thetas.row(step) = theta.transpose();
      if (step >= opts.burn_in) {
        const Index r = step - opts.burn_in;
        if (opts.store_u) chain.u_history.row(r) = u.transpose();
        if (opts.store_tau)
          chain.tau_history.row(r) =
              tau_from_theta(family.hyper, theta).transpose();
      }
      chain.completed_steps = step + 1;
    }
  } catch (const std::exception& e) {
    chain.aborted = true;
    chain.abort_reason = e.what();
    chain.thetas.conservativeResize(chain.completed_steps, n0);
  }
  chain.accept_rate /= static_cast<double>(std::max<Index>(chain.completed_steps, 1));
  return chain;
}

double log_hyper_prior(const HyperPriors& priors, double sigma,
                       std::optional<double> s, const Vector& theta) {
  double val = -0.5 * theta.squaredNorm();
  const double zs = (std::log(sigma) - priors.log_sigma_mean) / priors.log_sigma_sd;
  val -= 0.5 * zs * zs;
  if (s) {
    const double zv = (std::log(*s) - priors.log_s_mean) / priors.log_s_sd;
    val -= 0.5 * zv * zv;
  }
  return val;
}

double log_marginal_gaussian(double sigma, double s_use, const Vector& theta,
                             const LatentFamily& family,
                             const IndexVector& obs_indices, const Vector& y,
                             const HyperPriors& priors, bool s_inferred) {
  const Index n = family.n();
  check_indices(obs_indices, n);
  const auto J = static_cast<double>(obs_indices.size());
  LatentPrecision precision(family.model_at(theta, s_use));
  const double inv_s2 = 1.0 / (sigma * sigma);
  Vector diag_add =
      scatter(obs_indices, Vector::Constant(obs_indices.size(), inv_s2), n);
  auto tilde = precision.shifted(diag_add);
  const Vector sty = scatter(obs_indices, y, n);
  const double quad_term = sty.dot(tilde.solve(sty));

  double val = log_hyper_prior(
      priors, sigma, s_inferred ? std::optional<double>(s_use) : std::nullopt,
      theta);
  val += -J * std::log(sigma) + 0.5 * inv_s2 * inv_s2 * quad_term -
         0.5 * inv_s2 * y.squaredNorm();
  // det(Q) - det(Qtilde) taken as a log-determinant difference
  val += 0.5 * (precision.log_det() - tilde.log_det());
  return val;
}

Predictive predictive_gaussian(double sigma, double s_use,
                               const Vector& theta, const LatentFamily& family,
                               const IndexVector& obs_indices,
                               const Vector& y) {
  const Index n = family.n();
  check_indices(obs_indices, n);
  LatentPrecision precision(family.model_at(theta, s_use));
  const double inv_s2 = 1.0 / (sigma * sigma);
  Vector diag_add =
      scatter(obs_indices, Vector::Constant(obs_indices.size(), inv_s2), n);
  auto tilde = precision.shifted(diag_add);

  Predictive out;
  out.mean = inv_s2 * tilde.solve(scatter(obs_indices, y, n));
  out.var.resize(n);
  Vector e = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    e[i] = 1.0;
    out.var[i] = std::max(0.0, tilde.solve(e)[i]);
    e[i] = 0.0;
  }
  return out;
}

Matrix predictive_cov_block(double sigma, double s_use, const Vector& theta,
                            const LatentFamily& family,
                            const IndexVector& obs_indices, const Vector& y,
                            const IndexVector& block) {
  const Index n = family.n();
  check_indices(obs_indices, n);
  check_indices(block, n);
  (void)y;
  LatentPrecision precision(family.model_at(theta, s_use));
  const double inv_s2 = 1.0 / (sigma * sigma);
  Vector diag_add =
      scatter(obs_indices, Vector::Constant(obs_indices.size(), inv_s2), n);
  auto tilde = precision.shifted(diag_add);
  const Index k = block.size();
  Matrix cov(k, k);
  Vector e = Vector::Zero(n);
  for (Index a = 0; a < k; ++a) {
    e[block[a]] = 1.0;
    Vector col = tilde.solve(e);
    e[block[a]] = 0.0;
    for (Index b = 0; b < k; ++b) cov(b, a) = col[block[b]];
  }
  return 0.5 * (cov + cov.transpose()).eval();
}

NelderMeadResult optimize_evidence(
    const std::function<double(const Vector&)>& objective, const Vector& init,
    const NelderMeadOptions& opts) {
  const Index dim = init.size();
  if (dim < 1) throw std::invalid_argument("optimize_evidence: empty init");
  NelderMeadResult res;
  res.evals = 0;

  auto f = [&](const Vector& x) {
    ++res.evals;
    const double v = objective(x);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };

  // simplex of dim+1 vertices, minimized on -objective
  std::vector<Vector> xs(static_cast<std::size_t>(dim + 1));
  std::vector<double> fs(static_cast<std::size_t>(dim + 1));
  xs[0] = init;
  fs[0] = f(init);
  if (!std::isfinite(fs[0]))
    throw std::invalid_argument(
        "optimize_evidence: objective not finite at the initial point");
  for (Index i = 0; i < dim; ++i) {
    Vector x = init;
    x[i] += opts.init_step;
    xs[static_cast<std::size_t>(i + 1)] = x;
    fs[static_cast<std::size_t>(i + 1)] = f(x);
  }

  auto order = [&]() {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<Vector> xs2(xs.size());
    std::vector<double> fs2(fs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      xs2[i] = xs[idx[i]];
      fs2[i] = fs[idx[i]];
    }
    xs.swap(xs2);
    fs.swap(fs2);
  };

  order();
  while (res.evals < opts.max_evals) {
    double diameter = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      diameter = std::max(diameter, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
    res.trace.push_back(-fs[0]);
    if (diameter < opts.simplex_tol) {
      res.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(dim);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) centroid += xs[i];
    centroid /= static_cast<double>(dim);

    const std::size_t worst = xs.size() - 1;
    Vector xr = centroid + (centroid - xs[worst]);
    const double fr = f(xr);
    if (fr < fs[0]) {
      Vector xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[worst - 1]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      Vector xc = centroid + 0.5 * (xs[worst] - centroid);
      const double fc = f(xc);
      if (fc < fs[worst]) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (std::size_t i = 1; i < xs.size(); ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
    order();
  }
  res.x = xs[0];
  res.value = -fs[0];
  return res;
}

Vector probit_hessian_diag(const Vector& u, const ProbitObs& obs) {
  // -d^2/du_i^2 log Phi(y_i u_i / sigma)
  //   = [t_i r(t_i) + r(t_i)^2] / sigma^2, t_i = y_i u_i / sigma,
  // with r the inverse Mills ratio phi/Phi.
  const double inv_s = 1.0 / obs.sigma;
  Vector h = Vector::Zero(u.size());
  for (Index a = 0; a < obs.indices.size(); ++a) {
    const Index i = obs.indices[a];
    const double t = obs.labels[a] * u[i] * inv_s;
    const double r = mills_ratio(t);
    h[i] += (t * r + r * r) * inv_s * inv_s;
  }
  return h;
}

double probit_objective(const LatentPrecision& precision, const Vector& u,
                        const ProbitObs& obs) {
  double loglik = 0.0;
  const double inv_s = 1.0 / obs.sigma;
  for (Index a = 0; a < obs.indices.size(); ++a)
    loglik += log_norm_cdf(obs.labels[a] * u[obs.indices[a]] * inv_s);
  return loglik - 0.5 * precision.quad(u);
}

Vector probit_objective_gradient(const LatentPrecision& precision,
                                 const Vector& u, const ProbitObs& obs) {
  const double inv_s = 1.0 / obs.sigma;
  Vector g = -precision.apply(u);
  for (Index a = 0; a < obs.indices.size(); ++a) {
    const Index i = obs.indices[a];
    const double t = obs.labels[a] * u[i] * inv_s;
    g[i] += obs.labels[a] * inv_s * mills_ratio(t);
  }
  return g;
}

ProbitMode probit_mode_newton(const LatentPrecision& precision,
                              const ProbitObs& obs) {
  const Index n = precision.n();
  check_indices(obs.indices, n);
  ProbitMode mode;
  mode.u = Vector::Zero(n);
  if (obs.indices.size() == 0) return mode;

  double objective = probit_objective(precision, mode.u, obs);
  for (Index it = 0; it < 100; ++it) {
    mode.iterations = it;
    Vector g = probit_objective_gradient(precision, mode.u, obs);
    mode.grad_norm = g.cwiseAbs().maxCoeff();
    if (mode.grad_norm < 1e-8) return mode;

    Vector h = probit_hessian_diag(mode.u, obs);
    Vector step = precision.shifted(h).solve(g);
    double alpha = 1.0;
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      Vector trial = mode.u + alpha * step;
      const double trial_obj = probit_objective(precision, trial, obs);
      if (trial_obj >= objective) {
        mode.u = trial;
        objective = trial_obj;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no ascent possible, gradient is already tiny
  }
  Vector g = probit_objective_gradient(precision, mode.u, obs);
  mode.grad_norm = g.cwiseAbs().maxCoeff();
  return mode;
}

double probit_laplace_evidence(double sigma, double s_use,
                               const Vector& theta, const LatentFamily& family,
                               const ProbitObs& obs,
                               const HyperPriors& priors, bool s_inferred) {
  LatentPrecision precision(family.model_at(theta, s_use));
  ProbitObs scaled = obs;
  scaled.sigma = sigma;
  ProbitMode mode = probit_mode_newton(precision, scaled);
  const Vector h = probit_hessian_diag(mode.u, scaled);
  double val = log_hyper_prior(
      priors, sigma, s_inferred ? std::optional<double>(s_use) : std::nullopt,
      theta);
  val -= 0.5 * precision.quad(mode.u);
  val += 0.5 * (precision.log_det() - precision.shifted(h).log_det());
  const double inv_s = 1.0 / sigma;
  for (Index a = 0; a < scaled.indices.size(); ++a)
    val += log_norm_cdf(scaled.labels[a] * mode.u[scaled.indices[a]] * inv_s);
  return val;
}

Eigen::VectorXi classify(const Vector& u) {
  Eigen::VectorXi labels(u.size());
  for (Index i = 0; i < u.size(); ++i) labels[i] = u[i] < 0.0 ? -1 : 1;
  return labels;
}

double score_rmse(const Vector& pred_mean, const Vector& y_test) {
  if (pred_mean.size() != y_test.size() || y_test.size() == 0)
    throw std::invalid_argument("score_rmse: size mismatch");
  return (y_test - pred_mean).norm() /
         std::sqrt(static_cast<double>(y_test.size()));
}

double score_crps_gaussian(double a, double b, double y) {
  if (b <= 0.0) throw std::invalid_argument("score_crps_gaussian: b must be > 0");
  const double z = (y - a) / b;
  return b * (z * (2.0 * norm_cdf(z) - 1.0) + 2.0 * norm_pdf(z) -
              1.0 / std::sqrt(kPi));
}

double score_ls(const Vector& mean, const Matrix& cov, const Vector& y_test) {
  const Index k = y_test.size();
  if (mean.size() != k || cov.rows() != k || cov.cols() != k)
    throw std::invalid_argument("score_ls: size mismatch");
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw FactorizationError("score_ls: covariance not PD", -1);
  const Vector r = y_test - mean;
  const double quad = r.dot(llt.solve(r));
  const double logdet =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return 0.5 * (k * std::log(2.0 * kPi) + logdet + quad);
}

}  // namespace graphfield
