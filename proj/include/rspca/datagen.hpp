#pragma once

// Simulation data: the block-sparse loading model with outlier contamination,
// and a surrogate spectroscopy profile stream with sparse peak segments.
// All generators are pure functions of (config, seed).

#include <cstdint>
#include <utility>
#include <vector>

#include "rspca/types.hpp"

namespace rspca {

struct SimConfig {
  int p = 100;
  int b = 10;                 // size of the two large blocks
  Vector latent_variances;    // length K = p - 2b + 2
  double delta = 0.0;         // contamination proportion
  Vector outlier_mean;        // length p
  double outlier_variance = 20.0;
  double noise_variance = 1.0;
  int n = 500;
  std::uint64_t seed = 0;

  int blocks() const { return p - 2 * b + 2; }
  void validate() const;

  // Variance pattern of the recovery study: [233, 49, 4 x (K-40), 2 x 19,
  // 0.4 x 19]; requires K >= 42.
  static Vector pattern_variances(int blocks);
  // 25 * (0,-4,4,2,0,4,-4,2,...) tiled over the two large blocks (restarting
  // at the second block when `restart_tile` is set), then 25 * (3,-3,...).
  static Vector pattern_outlier_mean(int p, int b, bool restart_tile = true);

  static SimConfig paper_scale(double delta, int n, std::uint64_t seed);
  static SimConfig desk_scale(double delta, int n, std::uint64_t seed);
};

struct GroundTruth {
  Matrix a_true;                  // p x K block loadings
  std::vector<char> outlier_flags;  // length n
  Vector latent_variances;
};

// Block-sparse loading matrix: entries -1/sqrt(b_k) on block k's support.
// Blocks 1 and 2 have size b, the remaining K-2 are singletons, laid out
// contiguously.
Matrix make_block_loadings(int p, int b);

// Draws n samples x_t = A z_t + white noise and replaces round(delta * n)
// uniformly chosen rows by N(outlier_mean, outlier_variance * I) draws.
std::pair<Dataset, GroundTruth> generate_dataset(const SimConfig& config);

// In-control-mechanism stream with the first latent mean offset by
// shift_sd standard deviations; no contamination (rows are raw samples).
Matrix generate_oc_stream(const SimConfig& config, const Matrix& a_true,
                          double shift_sd, int length, std::uint64_t seed);

struct ProfileSegment {
  int start = 0;        // 1-based, inclusive
  int end = 0;          // 1-based, inclusive
  double peak_height = 1.0;
  double peak_width = 10.0;
};

struct ProfileConfig {
  int length = 512;
  std::vector<ProfileSegment> segments;
  double amplitude_sd = 0.25;      // per-sample random scaling of each peak
  double noise_base = 0.05;
  double signal_noise_coeff = 0.03;
  double outlier_rate = 0.0;
  double outlier_noise_mult = 5.0;
  std::vector<double> defect_shift;  // per segment
  std::uint64_t seed = 0;

  void validate() const;
  Vector baseline() const;  // smooth peak profile, zero off-segment

  // Three-segment layout echoing the D-band / middle / G-band structure.
  static ProfileConfig defaults();
};

// Ordered profiles (rows). defect_segment is a 0-based segment index or -1
// for none; when set, that segment's mean is shifted from the first sample.
Matrix generate_profile_stream(const ProfileConfig& config, int defect_segment,
                               int length_n, std::uint64_t seed);

}  // namespace rspca
