#include <Eigen/Dense>
#include <cmath>

#include "rspca/errors.hpp"
#include "rspca/kernels.hpp"

namespace rspca::kernels {

void solve_loading_row(const Vector& prior_diag, double gamma_mean,
                       const Matrix& scatter, const Vector& cross_col,
                       double ridge, Vector& mean, Matrix& cov) {
  const int q = static_cast<int>(prior_diag.size());
  Matrix prec = gamma_mean * scatter;
  prec.diagonal() += prior_diag;
  double jitter = 0.0;
  for (;;) {
    Matrix attempt = prec;
    if (jitter > 0.0) attempt.diagonal().array() += jitter;
    Eigen::LDLT<Matrix> ldlt(attempt);
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
      cov = ldlt.solve(Matrix::Identity(q, q));
      cov = 0.5 * (cov + cov.transpose()).eval();
      mean = gamma_mean * (cov * cross_col);
      return;
    }
    jitter = (jitter == 0.0) ? ridge * 10.0 : jitter * 10.0;
    if (jitter > 1e-4) {
      throw NumericError("loading row update: precision not SPD after jitter escalation");
    }
  }
}

namespace serial {

void latent_sweep(const LatentInputs& in, std::vector<LatentPosterior>& latent,
                  std::vector<double>& logdet) {
  const Matrix& xa = *in.xa;
  const Matrix& w = *in.w;
  const Vector& dtil = *in.dtil;
  const int n = static_cast<int>(xa.rows());
  const int q = static_cast<int>(xa.cols());
  latent.resize(n);
  logdet.resize(n);
  for (int t = 0; t < n; ++t) {
    const double c = (*in.c)(t);
    Vector f(q);
    double ld = in.logdet_phi_inv;
    for (int j = 0; j < q; ++j) {
      f(j) = 1.0 / (1.0 + c * dtil(j));
      ld += std::log(f(j));
    }
    Matrix cov = w * f.asDiagonal() * w.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
    latent[t].covariance = cov;
    latent[t].mean = c * (cov * xa.row(t).transpose());
    logdet[t] = ld;
  }
}

void residual_sweep(const ResidualInputs& in,
                    const std::vector<LatentPosterior>& latent, Vector& r) {
  const Matrix& x = *in.x;
  const Matrix& ma = *in.ma;
  const int n = static_cast<int>(x.rows());
  r.resize(n);
  for (int t = 0; t < n; ++t) {
    const Vector& mz = latent[t].mean;
    const Matrix& sz = latent[t].covariance;
    const double fit = (x.row(t).transpose() - ma * mz).squaredNorm();
    double rt = fit + (in.gram_mean->cwiseProduct(sz)).sum();
    if (in.include_loading_cov) {
      Matrix ezz = sz + mz * mz.transpose();
      rt += (in.cov_sum->cwiseProduct(ezz)).sum();
    }
    r(t) = rt;
  }
}

void weighted_scatter(const Matrix& x, const std::vector<LatentPosterior>& latent,
                      const Vector& w, Matrix& scatter, Matrix& cross) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  const int q = static_cast<int>(latent.empty() ? 0 : latent[0].mean.size());
  scatter = Matrix::Zero(q, q);
  cross = Matrix::Zero(q, p);
  for (int t = 0; t < n; ++t) {
    const Vector& mz = latent[t].mean;
    scatter.noalias() += w(t) * (latent[t].covariance + mz * mz.transpose());
    cross.noalias() += (w(t) * mz) * x.row(t);
  }
  scatter = 0.5 * (scatter + scatter.transpose()).eval();
}

double weighted_sum(const Vector& w, const Vector& v) {
  double s = 0.0;
  for (int t = 0; t < w.size(); ++t) s += w(t) * v(t);
  return s;
}

void loading_sweep(const LoadingInputs& in, LoadingOutputs& out) {
  const Matrix& prior = *in.prior_precision;
  const int p = static_cast<int>(prior.rows());
  const int q = static_cast<int>(prior.cols());
  out.mean_rows.resize(p, q);
  out.row_variances.resize(p, q);
  out.row_covariance_sum = Matrix::Zero(q, q);
  out.sum_logdet = 0.0;
  Vector mean(q);
  Matrix cov(q, q);
  for (int i = 0; i < p; ++i) {
    solve_loading_row(prior.row(i).transpose(), in.gamma_mean, *in.scatter,
                      in.cross->col(i), in.ridge, mean, cov);
    out.mean_rows.row(i) = mean.transpose();
    out.row_variances.row(i) = cov.diagonal().transpose();
    out.row_covariance_sum += cov;
    out.sum_logdet += Eigen::LDLT<Matrix>(cov).vectorD().array().log().sum();
  }
  out.row_covariance_sum =
      (0.5 * (out.row_covariance_sum + out.row_covariance_sum.transpose())).eval();
}

}  // namespace serial
}  // namespace rspca::kernels
