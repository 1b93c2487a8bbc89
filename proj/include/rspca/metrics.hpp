#pragma once

// Evaluation measures: subspace deviation angle, total zero measure, and
// detection-delay summaries.

#include <optional>
#include <vector>

#include "rspca/monitor.hpp"
#include "rspca/types.hpp"

namespace rspca {

using MaskMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Average principal angle between the column spans, normalized to [0, 1]
// (0 = identical subspaces, 1 = orthogonal). `use_max` switches to the
// maximal principal angle. Throws InputError naming a rank-deficient input.
double deviation_angle(const Matrix& a_est, const Matrix& a_true,
                       bool use_max = false);

// Fraction of positions whose zero/nonzero status agrees.
double zero_measure(const MaskMatrix& est_mask, const MaskMatrix& true_mask);

// |value| > eps mask used for deterministic (non-probabilistic) estimators.
MaskMatrix threshold_mask(const Matrix& loadings, double eps = 1e-5);

struct DelaySummary {
  std::optional<double> mean;
  std::optional<double> stddev;
  int censored_count = 0;
  int used = 0;
};

// Censored runs are excluded from mean/std and counted separately.
DelaySummary summarize_delays(const std::vector<RunLength>& delays);

struct ExperimentResult {
  int n = 0;
  int p = 0;
  double delta = 0.0;
  VariantKind variant = VariantKind::RobustSparse;
  double shift_sd = 0.0;
  std::vector<double> replicate_values;
  double mean = 0.0;
  double stddev = 0.0;

  void finalize();  // fills mean/stddev from replicate_values
};

}  // namespace rspca
