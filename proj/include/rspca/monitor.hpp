#pragma once

// Online scoring of new samples against a fitted model: latent and residual
// alarm statistics, chi-square or Monte-Carlo control limits, run lengths.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rspca/types.hpp"

namespace rspca {

enum class LimitMethod { ChiSquare, MonteCarlo };

struct ControlLimits {
  double latent_limit = 0.0;
  double residual_limit = 0.0;
  double alpha = 0.0;
  LimitMethod method = LimitMethod::ChiSquare;
  std::optional<double> target_arl0;
};

struct MonitorScore {
  double latent_stat = 0.0;
  double residual_stat = 0.0;
  bool latent_alarm = false;
  bool residual_alarm = false;
  double gamma_weight = 1.0;
  Vector latent_mean;
};

// Posterior of one new sample under frozen model parameters.
struct SampleInference {
  Vector mean;       // <z_tau>
  Matrix covariance; // Sigma_{z_tau}
  double gamma_weight = 1.0;
  double eta = 0.0;  // mean squared residual moment
};

// Iterates the latent and robustness-weight updates with A, gamma, lambda
// frozen until <Gamma_tau> moves less than 1e-8 or inner_iters passes.
SampleInference infer_sample(const FittedModel& model, const Vector& x_centered,
                             int inner_iters = 10);

// Chi-square reference limits: chi2(1-alpha, q) and chi2(1-alpha, p).
ControlLimits chi_square_limits(const FittedModel& model, double alpha);

MonitorScore score_sample(const FittedModel& model, const Vector& x_raw,
                          const ControlLimits& limits, int inner_iters = 10);

// Draws one raw in-control sample; must be deterministic in the seed.
using SampleSource = std::function<Vector(std::uint64_t seed)>;

// Monte-Carlo limits: per-chart alarm probability 1/(2 target_arl0), limits
// as empirical quantiles of the statistics over `runs` in-control samples.
ControlLimits calibrate_limits(const FittedModel& model, const SampleSource& source,
                               double target_arl0, int runs, std::uint64_t seed,
                               int inner_iters = 10);

// Parametric in-control source simulated from the fitted model itself.
SampleSource model_sample_source(const FittedModel& model);

struct RunLength {
  int length = 0;
  bool censored = false;
};

// 1-based index, counted from change_point (0-based row), of the first
// sample whose latent OR residual alarm fires; censored if none does.
RunLength run_length(const FittedModel& model, const ControlLimits& limits,
                     const Matrix& stream_raw, int change_point,
                     int inner_iters = 10);

}  // namespace rspca
