#pragma once

// Data-parallel inner loops of the coordinate-ascent sweep. Two backends
// share one contract: `serial` is the straightforward reference kept for
// testing, `omp` is the production path. All omp reductions run over fixed
// sample blocks combined in index order, so results are identical for any
// thread count (and bit-stable across repeated runs).

#include <vector>

#include "rspca/types.hpp"

namespace rspca::kernels {

// Fixed reduction block; independent of the OpenMP thread count.
inline constexpr int kReductionBlock = 256;

struct LatentInputs {
  const Matrix* xa;      // n x q, row t = x_t^T <A>
  const Matrix* w;       // q x q factor with Sigma_z(c) = W diag(1/(1+c d)) W^T
  const Vector* dtil;    // q eigenvalues of Phi^{-1/2} <A^T A> Phi^{-1/2}
  const Vector* c;       // n, c_t = <gamma> <Gamma_t>
  double logdet_phi_inv; // ln|Phi^{-1}|
};

struct ResidualInputs {
  const Matrix* x;       // n x p centered data
  const Matrix* ma;      // p x q loading means
  const Matrix* gram_mean;  // q x q, <A>^T <A>
  const Matrix* cov_sum;    // q x q, sum_i Sigma_{A_i}
  bool include_loading_cov; // add tr(cov_sum E[z z^T]) to the residual moment
};

struct LoadingInputs {
  const Matrix* prior_precision;  // p x q prior precision diag (Lambda field)
  double gamma_mean;
  const Matrix* scatter;     // q x q, sum_t w_t E[z_t z_t^T]
  const Matrix* cross;       // q x p, col i = sum_t w_t <z_t> x_{i,t}
  double ridge;
};

struct LoadingOutputs {
  Matrix mean_rows;           // p x q
  Matrix row_variances;       // p x q
  Matrix row_covariance_sum;  // q x q
  double sum_logdet = 0.0;
};

namespace serial {

void latent_sweep(const LatentInputs& in, std::vector<LatentPosterior>& latent,
                  std::vector<double>& logdet);

// R_t = E||x_t - A z_t||^2 under the current posteriors.
void residual_sweep(const ResidualInputs& in,
                    const std::vector<LatentPosterior>& latent, Vector& r);

// scatter = sum_t w_t (mz mz^T + Sz); cross = sum_t w_t mz_t x_t^T.
void weighted_scatter(const Matrix& x, const std::vector<LatentPosterior>& latent,
                      const Vector& w, Matrix& scatter, Matrix& cross);

double weighted_sum(const Vector& w, const Vector& v);

void loading_sweep(const LoadingInputs& in, LoadingOutputs& out);

}  // namespace serial

namespace omp {

void latent_sweep(const LatentInputs& in, std::vector<LatentPosterior>& latent,
                  std::vector<double>& logdet);

void residual_sweep(const ResidualInputs& in,
                    const std::vector<LatentPosterior>& latent, Vector& r);

void weighted_scatter(const Matrix& x, const std::vector<LatentPosterior>& latent,
                      const Vector& w, Matrix& scatter, Matrix& cross);

double weighted_sum(const Vector& w, const Vector& v);

void loading_sweep(const LoadingInputs& in, LoadingOutputs& out);

}  // namespace omp

// Shared row solve: covariance, mean and variance diagonal of one loading row.
// Escalates the jitter by x10 up to 1e-4 if the q x q system is not SPD.
void solve_loading_row(const Vector& prior_diag, double gamma_mean,
                       const Matrix& scatter, const Vector& cross_col,
                       double ridge, Vector& mean, Matrix& cov);

}  // namespace rspca::kernels
