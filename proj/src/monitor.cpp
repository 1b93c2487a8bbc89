#include "rspca/monitor.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "rspca/rng.hpp"
#include "rspca/special.hpp"

namespace rspca {

namespace {

double empirical_quantile(std::vector<double>& values, double prob) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<long>(values.size());
  long idx = static_cast<long>(std::ceil(prob * n)) - 1;
  idx = std::clamp(idx, 0L, n - 1);
  return values[idx];
}

}  // namespace

SampleInference infer_sample(const FittedModel& model, const Vector& xc,
                             int inner_iters) {
  const int p = model.p();
  const int q = model.q();
  const bool robust = variant_robust(model.config.variant);
  const bool literal = model.config.literal_paper_updates;
  const Matrix gram = model.expected_gram();
  const Matrix& ma = model.state.loading.mean_rows;
  const Matrix gram_mean = ma.transpose() * ma;
  const Vector atx = ma.transpose() * xc;
  const double gamma = model.state.gamma_mean;
  const double order = model.state.gig_gamma_order;

  SampleInference out;
  out.gamma_weight = 1.0;
  for (int it = 0; it < std::max(1, inner_iters); ++it) {
    const double c = gamma * out.gamma_weight;
    Matrix prec = c * gram;
    prec.diagonal() += model.state.phi;
    Eigen::LDLT<Matrix> ldlt(prec);
    out.covariance = ldlt.solve(Matrix::Identity(q, q));
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    out.mean = c * (out.covariance * atx);

    double r = (xc - ma * out.mean).squaredNorm() +
               gram_mean.cwiseProduct(out.covariance).sum();
    if (!literal) {
      const Matrix ezz = out.covariance + out.mean * out.mean.transpose();
      r += model.state.loading.row_covariance_sum.cwiseProduct(ezz).sum();
    }
    out.eta = std::max(r / static_cast<double>(p), model.config.ridge);

    if (!robust) break;
    const double next = literal
                            ? std::sqrt(1.0 / (gamma * out.eta))
                            : gig_mean(order, 1.0, gamma * p * out.eta);
    const double change = std::abs(next - out.gamma_weight);
    out.gamma_weight = next;
    if (change < 1e-8) break;
  }
  return out;
}

ControlLimits chi_square_limits(const FittedModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("chi_square_limits: alpha must lie in (0,1)");
  }
  ControlLimits lim;
  lim.alpha = alpha;
  lim.method = LimitMethod::ChiSquare;
  lim.latent_limit = chi_square_quantile(1.0 - alpha, model.q());
  lim.residual_limit = chi_square_quantile(1.0 - alpha, model.p());
  return lim;
}

MonitorScore score_sample(const FittedModel& model, const Vector& x_raw,
                          const ControlLimits& limits, int inner_iters) {
  if (x_raw.size() != model.p()) {
    throw InputError("score_sample: sample length " +
                     std::to_string(x_raw.size()) + " does not match p=" +
                     std::to_string(model.p()));
  }
  if (!x_raw.allFinite()) {
    throw InputError("score_sample: non-finite entry in sample");
  }
  const Vector xc = x_raw - model.center;
  const SampleInference inf = infer_sample(model, xc, inner_iters);

  MonitorScore s;
  s.latent_mean = inf.mean;
  s.gamma_weight = inf.gamma_weight;
  s.latent_stat =
      inf.mean.dot(Eigen::LDLT<Matrix>(inf.covariance).solve(inf.mean));
  const double res2 = (xc - model.state.loading.mean_rows * inf.mean).squaredNorm();
  const double gamma = model.state.gamma_mean;
  if (model.config.literal_paper_updates) {
    s.residual_stat = res2 / (gamma * inf.gamma_weight);
  } else {
    s.residual_stat = gamma * inf.gamma_weight * res2;
  }
  s.latent_stat = std::max(s.latent_stat, 0.0);
  s.latent_alarm = s.latent_stat > limits.latent_limit;
  s.residual_alarm = s.residual_stat > limits.residual_limit;
  return s;
}

SampleSource model_sample_source(const FittedModel& model) {
  const Matrix ma = model.state.loading.mean_rows;
  const Vector center = model.center;
  const Vector phi = model.state.phi;
  const double gamma = model.state.gamma_mean;
  const bool robust = variant_robust(model.config.variant);
  return [ma, center, phi, gamma, robust](std::uint64_t seed) {
    Rng rng(seed);
    const int p = static_cast<int>(ma.rows());
    const int q = static_cast<int>(ma.cols());
    Vector z(q);
    for (int j = 0; j < q; ++j) z(j) = rng.normal() / std::sqrt(phi(j));
    Vector x = ma * z;
    if (robust) {
      const double scale = 1.0 / std::sqrt(2.0 * gamma);
      for (int i = 0; i < p; ++i) x(i) += rng.laplace(scale);
    } else {
      const double sd = 1.0 / std::sqrt(gamma);
      for (int i = 0; i < p; ++i) x(i) += sd * rng.normal();
    }
    return Vector(x + center);
  };
}

ControlLimits calibrate_limits(const FittedModel& model, const SampleSource& source,
                               double target_arl0, int runs, std::uint64_t seed,
                               int inner_iters) {
  if (!(target_arl0 > 1.0)) {
    throw InputError("calibrate_limits: target_arl0 must exceed 1");
  }
  if (runs < 20.0 * target_arl0) {
    throw InputError("calibrate_limits: need at least 20 * target_arl0 = " +
                     std::to_string(static_cast<long>(20.0 * target_arl0)) +
                     " in-control samples, got " + std::to_string(runs));
  }
  std::vector<double> latent_stats(runs), residual_stats(runs);
  const ControlLimits open{};  // limits irrelevant while collecting statistics
#pragma omp parallel for schedule(static)
  for (int i = 0; i < runs; ++i) {
    const Vector x = source(split_seed(seed, static_cast<std::uint64_t>(i)));
    const MonitorScore s = score_sample(model, x, open, inner_iters);
    latent_stats[i] = s.latent_stat;
    residual_stats[i] = s.residual_stat;
  }
  // Even split of the per-sample false-alarm budget across the two charts.
  const double prob = 1.0 - 1.0 / (2.0 * target_arl0);
  ControlLimits lim;
  lim.alpha = 1.0 / target_arl0;
  lim.method = LimitMethod::MonteCarlo;
  lim.target_arl0 = target_arl0;
  lim.latent_limit = empirical_quantile(latent_stats, prob);
  lim.residual_limit = empirical_quantile(residual_stats, prob);
  return lim;
}

RunLength run_length(const FittedModel& model, const ControlLimits& limits,
                     const Matrix& stream_raw, int change_point,
                     int inner_iters) {
  const int n = static_cast<int>(stream_raw.rows());
  if (n == 0) throw InputError("run_length: empty stream");
  if (change_point < 0 || change_point >= n) {
    throw InputError("run_length: change_point outside the stream");
  }
  for (int t = change_point; t < n; ++t) {
    const MonitorScore s =
        score_sample(model, stream_raw.row(t).transpose(), limits, inner_iters);
    if (s.latent_alarm || s.residual_alarm) {
      return {t - change_point + 1, false};
    }
  }
  return {n - change_point, true};
}

}  // namespace rspca
