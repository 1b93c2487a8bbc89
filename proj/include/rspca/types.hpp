#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rspca/errors.hpp"

namespace rspca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Centered observations: rows are samples, columns are variables. `center`
// records the vector subtracted from the raw data so centering stays
// reversible.
struct Dataset {
  Matrix values;  // n x p, already centered
  Vector center;  // length p
  int n = 0;
  int p = 0;

  static Dataset from_centered(Matrix values, Vector center);
  static Dataset from_raw(const Matrix& raw, const Vector& center);
  void validate() const;
};

inline Dataset Dataset::from_centered(Matrix values, Vector center) {
  Dataset d;
  d.n = static_cast<int>(values.rows());
  d.p = static_cast<int>(values.cols());
  d.values = std::move(values);
  d.center = std::move(center);
  d.validate();
  return d;
}

inline Dataset Dataset::from_raw(const Matrix& raw, const Vector& center) {
  return from_centered(raw.rowwise() - center.transpose(), center);
}

inline void Dataset::validate() const {
  if (n < 2 || p < 1) {
    throw InputError("Dataset: need n >= 2 samples and p >= 1 variables, got n=" +
                     std::to_string(n) + " p=" + std::to_string(p));
  }
  if (center.size() != p) {
    throw InputError("Dataset: center length does not match p");
  }
  if (!values.allFinite() || !center.allFinite()) {
    throw InputError("Dataset: non-finite entry");
  }
}

// Gaussian variational posterior of one latent score vector.
struct LatentPosterior {
  Vector mean;        // <z_t>, length q
  Matrix covariance;  // Sigma_{z_t}, q x q SPD
};

// Row-wise Gaussian posteriors of the loading matrix. Full q x q row
// covariances are used during the sweep; the model keeps each row's mean,
// its variance diagonal (needed by the loading zero test), their sum over
// rows (needed by <A^T A>), and the summed log-determinant (evidence bound).
struct LoadingPosterior {
  Matrix mean_rows;           // p x q, row i = <A_i>
  Matrix row_variances;       // p x q, entry (i,j) = (Sigma_{A_i})_{jj}
  Matrix row_covariance_sum;  // q x q, sum_i Sigma_{A_i}
  double sum_logdet = 0.0;    // sum_i ln|Sigma_{A_i}|
};

enum class VariantKind { RobustSparse, SparseOnly, RobustOnly, Classical };

inline bool variant_robust(VariantKind v) {
  return v == VariantKind::RobustSparse || v == VariantKind::RobustOnly;
}
inline bool variant_sparse(VariantKind v) {
  return v == VariantKind::RobustSparse || v == VariantKind::SparseOnly;
}

std::string variant_name(VariantKind v);
VariantKind variant_from_name(const std::string& name);

// Everything the coordinate-ascent sweep tracks. The gig_* members record
// the parameters of the generalized-inverse-Gaussian variational factors so
// the evidence bound can be evaluated at any point between updates.
struct ModelState {
  LoadingPosterior loading;
  std::vector<LatentPosterior> latent;  // n entries
  std::vector<double> latent_logdet;    // ln|Sigma_{z_t}| per sample

  Matrix lambda_field;   // p x q, <Lambda_ij> (pinned constant for non-sparse)
  Matrix gig_lambda_chi; // p x q, chi of g(Lambda_ij)
  Matrix gig_lambda_psi; // p x q, psi of g(Lambda_ij)
  double lambda_hyper = 1.0;

  double gamma_a = 0.0, gamma_b = 0.0;  // Gamma posterior on gamma = 1/sigma^2
  double gamma_mean = 0.0;              // a / b

  Vector gamma_weights;   // length n, <Gamma_t> (pinned to 1 for non-robust)
  Vector gig_gamma_psi;   // length n, psi of g(Gamma_t)
  double gig_gamma_order = -0.5;

  Vector phi;  // length q, diagonal of the latent prior precision

  std::vector<double> elbo_trace;
};

struct FitConfig {
  int q = 2;
  VariantKind variant = VariantKind::RobustSparse;
  int max_sweeps = 500;
  double rel_tol = 1e-6;
  double gamma_prior_a = 1e-3;
  double gamma_prior_b = 1e-3;
  double lambda_init = 1.0;
  double phi_value = 1.0;
  double ridge = 1e-8;
  std::uint64_t seed = 0;
  bool literal_paper_updates = false;

  void validate(int n, int p) const;
};

struct FittedModel {
  ModelState state;
  Vector center;
  FitConfig config;
  bool converged = false;
  int sweeps_used = 0;

  int p() const { return static_cast<int>(state.loading.mean_rows.rows()); }
  int q() const { return static_cast<int>(state.loading.mean_rows.cols()); }

  // <A^T A> = <A>^T <A> + sum_i Sigma_{A_i}
  Matrix expected_gram() const {
    const Matrix& ma = state.loading.mean_rows;
    Matrix m = ma.transpose() * ma + state.loading.row_covariance_sum;
    return 0.5 * (m + m.transpose());
  }
};

}  // namespace rspca
