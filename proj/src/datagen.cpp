#include "rspca/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rspca/rng.hpp"

namespace rspca {

void SimConfig::validate() const {
  if (p <= 2 * b || b < 1) {
    throw InputError("SimConfig: need p > 2b >= 2");
  }
  const int k = blocks();
  if (k < 2) throw InputError("SimConfig: need K = p - 2b + 2 >= 2");
  if (latent_variances.size() != k) {
    throw InputError("SimConfig: latent_variances must have length K=" +
                     std::to_string(k));
  }
  if ((latent_variances.array() <= 0.0).any()) {
    throw InputError("SimConfig: latent variances must be positive");
  }
  const double rest_max =
      k > 2 ? latent_variances.tail(k - 2).maxCoeff() : 0.0;
  if (!(latent_variances(0) > rest_max) || !(latent_variances(1) > rest_max)) {
    throw InputError("SimConfig: the first two latent variances must dominate");
  }
  if (delta < 0.0 || delta >= 1.0) throw InputError("SimConfig: delta in [0,1)");
  if (outlier_mean.size() != p) {
    throw InputError("SimConfig: outlier_mean must have length p");
  }
  if (!(outlier_variance > 0.0) || !(noise_variance > 0.0)) {
    throw InputError("SimConfig: variances must be positive");
  }
  if (n < 2) throw InputError("SimConfig: need n >= 2");
}

Vector SimConfig::pattern_variances(int blocks) {
  if (blocks < 42) {
    throw InputError("pattern_variances: needs K >= 42 blocks");
  }
  Vector v(blocks);
  v(0) = 233.0;
  v(1) = 49.0;
  const int mid = blocks - 2 - 38;
  v.segment(2, mid).setConstant(4.0);
  v.segment(2 + mid, 19).setConstant(2.0);
  v.tail(19).setConstant(0.4);
  return v;
}

Vector SimConfig::pattern_outlier_mean(int p, int b, bool restart_tile) {
  static const double tile[8] = {0, -4, 4, 2, 0, 4, -4, 2};
  Vector mu(p);
  for (int i = 0; i < 2 * b; ++i) {
    const int phase = (restart_tile && i >= b) ? (i - b) % 8 : i % 8;
    mu(i) = tile[phase];
  }
  for (int i = 2 * b; i < p; ++i) {
    mu(i) = ((i - 2 * b) % 2 == 0) ? 3.0 : -3.0;
  }
  return 25.0 * mu;
}

SimConfig SimConfig::paper_scale(double delta, int n, std::uint64_t seed) {
  SimConfig c;
  c.p = 500;
  c.b = 20;
  c.latent_variances = pattern_variances(c.blocks());
  c.delta = delta;
  c.outlier_mean = pattern_outlier_mean(c.p, c.b);
  c.outlier_variance = 20.0;
  c.noise_variance = 1.0;
  c.n = n;
  c.seed = seed;
  return c;
}

SimConfig SimConfig::desk_scale(double delta, int n, std::uint64_t seed) {
  SimConfig c;
  c.p = 100;
  c.b = 10;
  c.latent_variances = pattern_variances(c.blocks());
  c.delta = delta;
  c.outlier_mean = pattern_outlier_mean(c.p, c.b);
  c.outlier_variance = 20.0;
  c.noise_variance = 1.0;
  c.n = n;
  c.seed = seed;
  return c;
}

Matrix make_block_loadings(int p, int b) {
  if (p <= 2 * b || b < 1) {
    throw InputError("make_block_loadings: need p > 2b >= 2");
  }
  const int k = p - 2 * b + 2;
  Matrix a = Matrix::Zero(p, k);
  const double v = -1.0 / std::sqrt(static_cast<double>(b));
  a.col(0).head(b).setConstant(v);
  a.col(1).segment(b, b).setConstant(v);
  for (int j = 2; j < k; ++j) {
    a(2 * b + (j - 2), j) = -1.0;
  }
  return a;
}

std::pair<Dataset, GroundTruth> generate_dataset(const SimConfig& config) {
  config.validate();
  const int n = config.n, p = config.p;
  const int k = config.blocks();
  GroundTruth truth;
  truth.a_true = make_block_loadings(p, config.b);
  truth.latent_variances = config.latent_variances;
  truth.outlier_flags.assign(n, 0);

  Rng rng(config.seed);
  const Vector sd = config.latent_variances.array().sqrt();
  const double noise_sd = std::sqrt(config.noise_variance);

  Matrix x(n, p);
  Vector z(k);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < k; ++j) z(j) = sd(j) * rng.normal();
    x.row(t) = (truth.a_true * z).transpose();
    for (int i = 0; i < p; ++i) x(t, i) += noise_sd * rng.normal();
  }

  const int n_out = static_cast<int>(std::lround(config.delta * n));
  if (n_out > 0) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < n_out; ++i) {  // partial Fisher-Yates
      const int j = i + static_cast<int>(rng.below(n - i));
      std::swap(order[i], order[j]);
    }
    const double out_sd = std::sqrt(config.outlier_variance);
    for (int i = 0; i < n_out; ++i) {
      const int t = order[i];
      truth.outlier_flags[t] = 1;
      for (int c = 0; c < p; ++c) {
        x(t, c) = config.outlier_mean(c) + out_sd * rng.normal();
      }
    }
  }

  // The mechanism is zero-mean; the recorded center is zero so that Phase-I
  // contamination cannot leak into the inlier location estimate.
  Dataset data = Dataset::from_centered(std::move(x), Vector::Zero(p));
  return {std::move(data), std::move(truth)};
}

Matrix generate_oc_stream(const SimConfig& config, const Matrix& a_true,
                          double shift_sd, int length, std::uint64_t seed) {
  if (shift_sd < 0.0) throw InputError("generate_oc_stream: shift_sd >= 0");
  if (length < 1) throw InputError("generate_oc_stream: length >= 1");
  const int p = static_cast<int>(a_true.rows());
  const int k = static_cast<int>(a_true.cols());
  if (config.latent_variances.size() != k) {
    throw InputError("generate_oc_stream: latent variance length mismatch");
  }
  Rng rng(seed);
  const Vector sd = config.latent_variances.array().sqrt();
  const double noise_sd = std::sqrt(config.noise_variance);
  const double shift = shift_sd * sd(0);

  Matrix x(length, p);
  Vector z(k);
  for (int t = 0; t < length; ++t) {
    for (int j = 0; j < k; ++j) z(j) = sd(j) * rng.normal();
    z(0) += shift;
    x.row(t) = (a_true * z).transpose();
    for (int i = 0; i < p; ++i) x(t, i) += noise_sd * rng.normal();
  }
  return x;
}

void ProfileConfig::validate() const {
  if (length < 2) throw InputError("ProfileConfig: length >= 2");
  if (segments.empty()) throw InputError("ProfileConfig: no segments");
  if (defect_shift.size() != segments.size()) {
    throw InputError("ProfileConfig: defect_shift must match segment count");
  }
  int prev_end = 0;
  for (const auto& s : segments) {
    if (s.start < 1 || s.end > length || s.start > s.end) {
      throw InputError("ProfileConfig: segment out of range");
    }
    if (s.start <= prev_end) {
      throw InputError("ProfileConfig: segments must be disjoint and ordered");
    }
    prev_end = s.end;
    if (!(s.peak_height > 0.0) || !(s.peak_width > 0.0)) {
      throw InputError("ProfileConfig: peak parameters must be positive");
    }
  }
  if (!(noise_base > 0.0) || signal_noise_coeff < 0.0) {
    throw InputError("ProfileConfig: invalid noise parameters");
  }
  if (outlier_rate < 0.0 || outlier_rate >= 1.0 || !(outlier_noise_mult > 1.0)) {
    throw InputError("ProfileConfig: invalid outlier parameters");
  }
  if (!(amplitude_sd >= 0.0)) throw InputError("ProfileConfig: amplitude_sd >= 0");
}

Vector ProfileConfig::baseline() const {
  Vector base = Vector::Zero(length);
  for (const auto& s : segments) {
    const double center = 0.5 * (s.start + s.end);
    for (int i = s.start; i <= s.end; ++i) {
      const double d = (i - center) / s.peak_width;
      base(i - 1) += s.peak_height * std::exp(-0.5 * d * d);
    }
  }
  return base;
}

ProfileConfig ProfileConfig::defaults() {
  ProfileConfig c;
  c.length = 512;
  c.segments = {{60, 140, 2.5, 16.0},    // D-band
                {230, 300, 1.5, 13.0},   // middle region
                {360, 450, 3.0, 18.0}};  // G-band
  c.amplitude_sd = 0.25;
  c.noise_base = 0.05;
  c.signal_noise_coeff = 0.03;
  c.outlier_rate = 0.08;
  c.outlier_noise_mult = 6.0;
  c.defect_shift = {0.35, 0.30, 0.35};
  return c;
}

Matrix generate_profile_stream(const ProfileConfig& config, int defect_segment,
                               int length_n, std::uint64_t seed) {
  config.validate();
  if (length_n < 1) throw InputError("generate_profile_stream: length_n >= 1");
  if (defect_segment >= static_cast<int>(config.segments.size())) {
    throw InputError("generate_profile_stream: defect segment out of range");
  }
  const int p = config.length;
  const int nseg = static_cast<int>(config.segments.size());
  Rng rng(seed);

  // Per-segment bump shapes.
  std::vector<Vector> bumps(nseg);
  for (int k = 0; k < nseg; ++k) {
    ProfileConfig one = config;
    one.segments = {config.segments[k]};
    one.defect_shift = {0.0};
    bumps[k] = one.baseline();
  }

  Matrix x(length_n, p);
  for (int t = 0; t < length_n; ++t) {
    Vector signal = Vector::Zero(p);
    for (int k = 0; k < nseg; ++k) {
      const double amp = 1.0 + config.amplitude_sd * rng.normal();
      signal += amp * bumps[k];
    }
    if (defect_segment >= 0) {
      const auto& s = config.segments[defect_segment];
      const double shift = config.defect_shift[defect_segment];
      for (int i = s.start; i <= s.end; ++i) signal(i - 1) += shift;
    }
    const bool outlier = rng.uniform() < config.outlier_rate;
    const double mult = outlier ? config.outlier_noise_mult : 1.0;
    for (int i = 0; i < p; ++i) {
      const double sd =
          mult * (config.noise_base + config.signal_noise_coeff * std::abs(signal(i)));
      x(t, i) = signal(i) + sd * rng.normal();
    }
  }
  return x;
}

}  // namespace rspca
