#include "rspca/vi.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rspca/kernels.hpp"
#include "rspca/special.hpp"

namespace rspca {

namespace {

constexpr double kLn2Pi = 1.8378770664093454836;

// Secondary stopping rule: loading means frozen in max norm.
constexpr double kLoadingFreezeTol = 1e-8;

void run_latent_pass(ModelState& state, const Dataset& data) {
  const int q = static_cast<int>(state.phi.size());
  Matrix gram = state.loading.mean_rows.transpose() * state.loading.mean_rows +
                state.loading.row_covariance_sum;
  gram = 0.5 * (gram + gram.transpose()).eval();

  const Vector phi_isqrt = state.phi.array().rsqrt();
  Matrix b = phi_isqrt.asDiagonal() * gram * phi_isqrt.asDiagonal();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  if (eig.info() != Eigen::Success) {
    throw NumericError("update_latent: eigendecomposition failed");
  }
  Vector dtil = eig.eigenvalues().cwiseMax(0.0);
  Matrix w = phi_isqrt.asDiagonal() * eig.eigenvectors();

  const Matrix xa = data.values * state.loading.mean_rows;  // n x q
  const Vector c = state.gamma_mean * state.gamma_weights;
  const double logdet_phi_inv = -state.phi.array().log().sum();

  kernels::LatentInputs in{&xa, &w, &dtil, &c, logdet_phi_inv};
  kernels::omp::latent_sweep(in, state.latent, state.latent_logdet);
  (void)q;
}

void set_lambda_gig(ModelState& state, double mean, double lambda, bool literal,
                    int i, int j) {
  // omega = -1/2 throughout, so mean = sqrt(chi/psi) in both orientations.
  if (literal) {
    state.gig_lambda_psi(i, j) = 2.0 / lambda;
    state.gig_lambda_chi(i, j) = mean * mean * state.gig_lambda_psi(i, j);
  } else {
    state.gig_lambda_chi(i, j) = 2.0 / lambda;
    state.gig_lambda_psi(i, j) = state.gig_lambda_chi(i, j) / (mean * mean);
  }
  state.lambda_field(i, j) = mean;
}

}  // namespace

namespace detail {

Vector residual_moments(const ModelState& state, const Dataset& data,
                        bool include_loading_cov) {
  Matrix gram_mean =
      state.loading.mean_rows.transpose() * state.loading.mean_rows;
  gram_mean = 0.5 * (gram_mean + gram_mean.transpose()).eval();
  kernels::ResidualInputs in{&data.values, &state.loading.mean_rows, &gram_mean,
                             &state.loading.row_covariance_sum,
                             include_loading_cov};
  Vector r;
  kernels::omp::residual_sweep(in, state.latent, r);
  return r;
}

double unit_mean_gig_psi(double order) {
  if (order == -0.5) return 1.0;
  double lo = -60.0, hi = 60.0;  // bisection over ln psi; mean decreases in psi
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gig_mean(order, 1.0, std::exp(mid)) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace detail

void FitConfig::validate(int n, int p) const {
  if (q < 1 || q > std::min(n, p)) {
    throw InputError("FitConfig: q must lie in [1, min(n, p)], got q=" +
                     std::to_string(q));
  }
  if (max_sweeps < 1) throw InputError("FitConfig: max_sweeps must be positive");
  if (!(rel_tol > 0.0) || !(ridge > 0.0) || !(lambda_init > 0.0) ||
      !(phi_value > 0.0) || !(gamma_prior_a > 0.0) || !(gamma_prior_b > 0.0)) {
    throw InputError("FitConfig: tolerances and priors must be positive");
  }
}

std::string variant_name(VariantKind v) {
  switch (v) {
    case VariantKind::RobustSparse: return "rs";
    case VariantKind::SparseOnly: return "sparse";
    case VariantKind::RobustOnly: return "robust";
    case VariantKind::Classical: return "classical";
  }
  return "?";
}

VariantKind variant_from_name(const std::string& name) {
  if (name == "rs" || name == "robust-sparse") return VariantKind::RobustSparse;
  if (name == "sparse") return VariantKind::SparseOnly;
  if (name == "robust") return VariantKind::RobustOnly;
  if (name == "classical") return VariantKind::Classical;
  throw InputError("unknown variant '" + name +
                   "' (expected rs|sparse|robust|classical)");
}

ModelState initialize(const Dataset& data, const FitConfig& config) {
  data.validate();
  config.validate(data.n, data.p);
  const int n = data.n, p = data.p, q = config.q;

  ModelState state;
  state.phi = Vector::Constant(q, config.phi_value);

  // Classical PPCA maximum-likelihood start from the sample covariance.
  Matrix cov = (data.values.transpose() * data.values) / static_cast<double>(n);
  cov = 0.5 * (cov + cov.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw NumericError("initialize: covariance eigendecomposition failed");
  }
  Vector evals = eig.eigenvalues();  // ascending
  double sigma2 = 0.0;
  if (p > q) {
    sigma2 = evals.head(p - q).sum() / static_cast<double>(p - q);
  }
  sigma2 = std::max(sigma2, config.ridge);

  Matrix loading(p, q);
  for (int j = 0; j < q; ++j) {
    const double ev = std::max(evals(p - 1 - j), config.ridge);
    const double scale = std::sqrt(std::max(ev - sigma2, config.ridge));
    loading.col(j) = eig.eigenvectors().col(p - 1 - j) * scale;
  }
  state.loading.mean_rows = loading;

  // Noise precision posterior centered on the PPCA estimate.
  state.gamma_a = config.gamma_prior_a + 0.5 * static_cast<double>(n) * p;
  state.gamma_b = state.gamma_a * sigma2;
  state.gamma_mean = state.gamma_a / state.gamma_b;

  // Lambda field flat at lambda_init.
  state.lambda_hyper = config.lambda_init;
  state.lambda_field.resize(p, q);
  state.gig_lambda_chi.resize(p, q);
  state.gig_lambda_psi.resize(p, q);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      set_lambda_gig(state, config.lambda_init, state.lambda_hyper,
                     config.literal_paper_updates, i, j);
    }
  }

  // Unit robustness weights.
  state.gamma_weights = Vector::Ones(n);
  state.gig_gamma_order =
      config.literal_paper_updates ? -0.5 : 0.5 * static_cast<double>(p) - 1.0;
  double psi1 = 1.0;
  if (variant_robust(config.variant)) {
    psi1 = detail::unit_mean_gig_psi(state.gig_gamma_order);
  }
  state.gig_gamma_psi = Vector::Constant(n, psi1);

  // One latent pass with the point loading estimate.
  state.loading.row_covariance_sum = Matrix::Zero(q, q);
  state.loading.row_variances = Matrix::Zero(p, q);
  state.loading.sum_logdet = 0.0;
  run_latent_pass(state, data);

  // Proper row covariances given the initial latents, keeping the PPCA means.
  {
    Matrix scatter, cross;
    kernels::omp::weighted_scatter(data.values, state.latent,
                                   state.gamma_weights, scatter, cross);
    Matrix prior = variant_sparse(config.variant)
                       ? state.lambda_field
                       : Matrix::Constant(p, q, config.ridge);
    kernels::LoadingInputs in{&prior, state.gamma_mean, &scatter, &cross,
                              config.ridge};
    kernels::LoadingOutputs out;
    kernels::omp::loading_sweep(in, out);
    state.loading.row_variances = out.row_variances;
    state.loading.row_covariance_sum = out.row_covariance_sum;
    state.loading.sum_logdet = out.sum_logdet;
  }

  state.elbo_trace.push_back(elbo(state, data, config));
  return state;
}

ModelState update_latent(ModelState state, const Dataset& data,
                         const FitConfig& config) {
  (void)config;
  run_latent_pass(state, data);
  return state;
}

ModelState update_lambda_field(ModelState state, const FitConfig& config) {
  if (!variant_sparse(config.variant)) return state;
  const int p = static_cast<int>(state.lambda_field.rows());
  const int q = static_cast<int>(state.lambda_field.cols());
  const double lambda = state.lambda_hyper;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      const double l = std::max(
          state.loading.mean_rows(i, j) * state.loading.mean_rows(i, j) +
              state.loading.row_variances(i, j),
          config.ridge);
      const double mean = config.literal_paper_updates
                              ? std::sqrt(0.5 * lambda * l)
                              : std::sqrt(2.0 / (lambda * l));
      set_lambda_gig(state, mean, lambda, config.literal_paper_updates, i, j);
    }
  }
  return state;
}

ModelState update_lambda_hyper(ModelState state, const FitConfig& config) {
  if (!variant_sparse(config.variant)) return state;
  if (config.literal_paper_updates) {
    state.lambda_hyper = state.lambda_field.mean();
  } else {
    // Exact point update: lambda = mean of E[1/Lambda_ij] under g(Lambda).
    const auto& chi = state.gig_lambda_chi;
    const auto& psi = state.gig_lambda_psi;
    const Matrix inv_mean =
        (psi.array() / chi.array()).sqrt() + chi.array().inverse();
    state.lambda_hyper = inv_mean.mean();
  }
  return state;
}

ModelState update_loadings(ModelState state, const Dataset& data,
                           const FitConfig& config) {
  const int p = data.p;
  const int q = static_cast<int>(state.phi.size());
  Matrix scatter, cross;
  kernels::omp::weighted_scatter(data.values, state.latent, state.gamma_weights,
                                 scatter, cross);
  Matrix cross_unweighted;
  if (config.literal_paper_updates) {
    Matrix ignored;
    const Vector ones = Vector::Ones(data.n);
    kernels::omp::weighted_scatter(data.values, state.latent, ones, ignored,
                                   cross_unweighted);
  }
  const Matrix prior = variant_sparse(config.variant)
                           ? state.lambda_field
                           : Matrix::Constant(p, q, config.ridge);
  kernels::LoadingInputs in{&prior, state.gamma_mean, &scatter,
                            config.literal_paper_updates ? &cross_unweighted
                                                         : &cross,
                            config.ridge};
  kernels::LoadingOutputs out;
  kernels::omp::loading_sweep(in, out);
  state.loading.mean_rows = std::move(out.mean_rows);
  state.loading.row_variances = std::move(out.row_variances);
  state.loading.row_covariance_sum = std::move(out.row_covariance_sum);
  state.loading.sum_logdet = out.sum_logdet;
  return state;
}

ModelState update_noise(ModelState state, const Dataset& data,
                        const FitConfig& config) {
  const int n = data.n, p = data.p;
  const bool literal = config.literal_paper_updates;
  const Vector r = detail::residual_moments(state, data, !literal);
  for (int t = 0; t < n; ++t) {
    if (!std::isfinite(r(t))) {
      throw NumericError("update_noise: non-finite residual moment at sample " +
                         std::to_string(t));
    }
  }
  const Vector eta = (r / static_cast<double>(p)).cwiseMax(config.ridge);

  if (variant_robust(config.variant)) {
    const double order = state.gig_gamma_order;
    for (int t = 0; t < n; ++t) {
      if (literal) {
        const double psi = state.gamma_mean * eta(t);
        state.gig_gamma_psi(t) = psi;
        state.gamma_weights(t) = std::sqrt(1.0 / psi);
      } else {
        const double psi = state.gamma_mean * p * eta(t);
        state.gig_gamma_psi(t) = psi;
        state.gamma_weights(t) = gig_mean(order, 1.0, psi);
      }
    }
  }

  const Vector r_for_b = literal ? eta * static_cast<double>(p) : r;
  state.gamma_a = config.gamma_prior_a + 0.5 * static_cast<double>(n) * p;
  state.gamma_b = config.gamma_prior_b +
                  0.5 * kernels::omp::weighted_sum(state.gamma_weights, r_for_b);
  state.gamma_mean = state.gamma_a / state.gamma_b;
  return state;
}

double elbo(const ModelState& state, const Dataset& data,
            const FitConfig& config) {
  const int n = data.n, p = data.p;
  const int q = static_cast<int>(state.phi.size());
  const bool robust = variant_robust(config.variant);
  const bool sparse = variant_sparse(config.variant);

  const double ln_gamma_mean = digamma(state.gamma_a) - std::log(state.gamma_b);
  const Vector r = detail::residual_moments(state, data, true);

  auto check = [](double v, const char* term) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("elbo: non-finite term: ") + term);
    }
    return v;
  };

  // Likelihood + noise-weight blocks.
  double like = 0.0;
  const double nu = state.gig_gamma_order;
  const double eln_coeff = 0.5 * p - 1.0 - nu;  // 0 when nu = p/2 - 1
  for (int t = 0; t < n; ++t) {
    const double g = state.gamma_weights(t);
    double ct = 0.5 * p * (ln_gamma_mean - kLn2Pi) -
                0.5 * state.gamma_mean * g * r(t);
    if (robust) {
      const double psi = state.gig_gamma_psi(t);
      const double u = std::sqrt(psi);
      ct += -0.5 * nu * std::log(psi) + log_bessel_k(nu, u) + 0.5 * psi * g;
      if (eln_coeff != 0.0) {
        ct += eln_coeff * gig_mean_log_half(1.0, psi);
      }
    }
    like += ct;
  }
  check(like, "likelihood");

  // Latent prior + entropy.
  double zterm = 0.0;
  const double ln_phi_det = state.phi.array().log().sum();
  for (int t = 0; t < n; ++t) {
    const Vector& mz = state.latent[t].mean;
    const Matrix& sz = state.latent[t].covariance;
    const double quad =
        (state.phi.array() * (mz.array().square() + sz.diagonal().array())).sum();
    zterm += 0.5 * ln_phi_det - 0.5 * q * kLn2Pi - 0.5 * quad;
    zterm += 0.5 * q * (1.0 + kLn2Pi) + 0.5 * state.latent_logdet[t];
  }
  check(zterm, "latent");

  // Loading prior + lambda blocks.
  double aterm = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      const double l2 = state.loading.mean_rows(i, j) * state.loading.mean_rows(i, j) +
                        state.loading.row_variances(i, j);
      if (!sparse) {
        const double pin = config.ridge;
        aterm += 0.5 * std::log(pin) - 0.5 * kLn2Pi - 0.5 * pin * l2;
        continue;
      }
      const double chi = state.gig_lambda_chi(i, j);
      const double psi = state.gig_lambda_psi(i, j);
      const double mean = state.lambda_field(i, j);
      const double inv_mean = std::sqrt(psi / chi) + 1.0 / chi;
      const double u = std::sqrt(chi * psi);
      const double lnk_half = 0.5 * std::log(std::numbers::pi / (2.0 * u)) - u;
      aterm += -0.5 * kLn2Pi - 0.5 * mean * l2;
      aterm += -std::log(state.lambda_hyper) - inv_mean / state.lambda_hyper;
      aterm += 0.25 * std::log(psi / chi) + std::numbers::ln2 + lnk_half +
               0.5 * (chi * inv_mean + psi * mean);
    }
  }
  aterm += 0.5 * p * q * (1.0 + kLn2Pi) + 0.5 * state.loading.sum_logdet;
  check(aterm, "loading");

  // Noise precision block.
  const double a0 = config.gamma_prior_a, b0 = config.gamma_prior_b;
  const double a = state.gamma_a, b = state.gamma_b;
  double gterm = a0 * std::log(b0) - std::lgamma(a0) +
                 (a0 - 1.0) * ln_gamma_mean - b0 * state.gamma_mean;
  gterm -= a * std::log(b) - std::lgamma(a) + (a - 1.0) * ln_gamma_mean - a;
  check(gterm, "gamma");

  return like + zterm + aterm + gterm;
}

FittedModel fit(const Dataset& data, const FitConfig& config) {
  FittedModel model;
  model.config = config;
  model.center = data.center;
  model.state = initialize(data, config);

  double prev_elbo = model.state.elbo_trace.back();
  Matrix prev_loading = model.state.loading.mean_rows;
  int sweep = 0;
  bool converged = false;
  while (sweep < config.max_sweeps) {
    ++sweep;
    model.state = update_latent(std::move(model.state), data, config);
    model.state = update_lambda_field(std::move(model.state), config);
    model.state = update_lambda_hyper(std::move(model.state), config);
    model.state = update_loadings(std::move(model.state), data, config);
    model.state = update_noise(std::move(model.state), data, config);
    const double value = elbo(model.state, data, config);
    model.state.elbo_trace.push_back(value);

    const double rel_change =
        std::abs(value - prev_elbo) / std::max(std::abs(value), 1e-12);
    const double loading_change =
        (model.state.loading.mean_rows - prev_loading).cwiseAbs().maxCoeff();
    if (rel_change < config.rel_tol || loading_change < kLoadingFreezeTol) {
      converged = true;
      break;
    }
    prev_elbo = value;
    prev_loading = model.state.loading.mean_rows;
  }
  model.sweeps_used = sweep;
  model.converged = converged;
  return model;
}

}  // namespace rspca
