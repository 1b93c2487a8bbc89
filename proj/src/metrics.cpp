#include "rspca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rspca {

namespace {

Matrix orthonormal_basis(const Matrix& a, const char* name) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const auto k = a.cols();
  if (qr.rank() < k) {
    throw InputError(std::string("deviation_angle: ") + name +
                     " is rank deficient");
  }
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), k);
  return q;
}

}  // namespace

double deviation_angle(const Matrix& a_est, const Matrix& a_true, bool use_max) {
  if (a_est.rows() != a_true.rows() || a_est.cols() != a_true.cols()) {
    throw InputError("deviation_angle: shape mismatch");
  }
  if (a_est.cols() < 1) throw InputError("deviation_angle: empty inputs");
  const Matrix q1 = orthonormal_basis(a_est, "estimated loadings");
  const Matrix q2 = orthonormal_basis(a_true, "true loadings");
  Eigen::JacobiSVD<Matrix> svd(q1.transpose() * q2);
  const Vector cosines = svd.singularValues().cwiseMin(1.0).cwiseMax(-1.0);
  const double half_pi = 0.5 * std::numbers::pi;
  if (use_max) {
    return std::acos(cosines.minCoeff()) / half_pi;
  }
  double sum = 0.0;
  for (int j = 0; j < cosines.size(); ++j) sum += std::acos(cosines(j));
  return sum / (cosines.size() * half_pi);
}

double zero_measure(const MaskMatrix& est_mask, const MaskMatrix& true_mask) {
  if (est_mask.rows() != true_mask.rows() || est_mask.cols() != true_mask.cols()) {
    throw InputError("zero_measure: shape mismatch");
  }
  const auto total = est_mask.size();
  if (total == 0) throw InputError("zero_measure: empty masks");
  long agree = 0;
  for (Eigen::Index j = 0; j < est_mask.cols(); ++j) {
    for (Eigen::Index i = 0; i < est_mask.rows(); ++i) {
      agree += est_mask(i, j) == true_mask(i, j);
    }
  }
  return static_cast<double>(agree) / static_cast<double>(total);
}

MaskMatrix threshold_mask(const Matrix& loadings, double eps) {
  return loadings.cwiseAbs().array() > eps;
}

DelaySummary summarize_delays(const std::vector<RunLength>& delays) {
  if (delays.empty()) throw InputError("summarize_delays: empty list");
  DelaySummary s;
  double sum = 0.0;
  for (const auto& d : delays) {
    if (d.censored) {
      ++s.censored_count;
    } else {
      sum += d.length;
      ++s.used;
    }
  }
  if (s.used == 0) return s;  // all censored: mean left undefined
  const double mean = sum / s.used;
  double ss = 0.0;
  for (const auto& d : delays) {
    if (!d.censored) ss += (d.length - mean) * (d.length - mean);
  }
  s.mean = mean;
  s.stddev = s.used > 1 ? std::sqrt(ss / (s.used - 1)) : 0.0;
  return s;
}

void ExperimentResult::finalize() {
  const auto m = replicate_values.size();
  if (m == 0) {
    mean = stddev = 0.0;
    return;
  }
  double sum = 0.0;
  for (double v : replicate_values) sum += v;
  mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double v : replicate_values) ss += (v - mean) * (v - mean);
  stddev = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0;
}

}  // namespace rspca
