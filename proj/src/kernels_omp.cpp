#include <omp.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rspca/kernels.hpp"

namespace rspca::kernels::omp {

namespace {
inline int block_count(int n) { return (n + kReductionBlock - 1) / kReductionBlock; }
}  // namespace

void latent_sweep(const LatentInputs& in, std::vector<LatentPosterior>& latent,
                  std::vector<double>& logdet) {
  const Matrix& xa = *in.xa;
  const Matrix& w = *in.w;
  const Vector& dtil = *in.dtil;
  const int n = static_cast<int>(xa.rows());
  const int q = static_cast<int>(xa.cols());
  latent.resize(n);
  logdet.resize(n);
#pragma omp parallel for schedule(static)
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
#pragma omp parallel for schedule(static)
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
  const int nb = block_count(n);
  std::vector<Matrix> scat_part(nb), cross_part(nb);
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < nb; ++blk) {
    const int lo = blk * kReductionBlock;
    const int hi = std::min(n, lo + kReductionBlock);
    Matrix s = Matrix::Zero(q, q);
    Matrix c = Matrix::Zero(q, p);
    for (int t = lo; t < hi; ++t) {
      const Vector& mz = latent[t].mean;
      s.noalias() += w(t) * (latent[t].covariance + mz * mz.transpose());
      c.noalias() += (w(t) * mz) * x.row(t);
    }
    scat_part[blk] = std::move(s);
    cross_part[blk] = std::move(c);
  }
  scatter = Matrix::Zero(q, q);
  cross = Matrix::Zero(q, p);
  for (int blk = 0; blk < nb; ++blk) {  // fixed combine order
    scatter += scat_part[blk];
    cross += cross_part[blk];
  }
  scatter = 0.5 * (scatter + scatter.transpose()).eval();
}

double weighted_sum(const Vector& w, const Vector& v) {
  const int n = static_cast<int>(w.size());
  const int nb = block_count(n);
  std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < nb; ++blk) {
    const int lo = blk * kReductionBlock;
    const int hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (int t = lo; t < hi; ++t) s += w(t) * v(t);
    part[blk] = s;
  }
  double total = 0.0;
  for (int blk = 0; blk < nb; ++blk) total += part[blk];
  return total;
}

void loading_sweep(const LoadingInputs& in, LoadingOutputs& out) {
  const Matrix& prior = *in.prior_precision;
  const int p = static_cast<int>(prior.rows());
  const int q = static_cast<int>(prior.cols());
  out.mean_rows.resize(p, q);
  out.row_variances.resize(p, q);
  const int nb = block_count(p);
  std::vector<Matrix> cov_part(nb);
  std::vector<double> logdet_part(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < nb; ++blk) {
    const int lo = blk * kReductionBlock;
    const int hi = std::min(p, lo + kReductionBlock);
    Matrix cov_sum = Matrix::Zero(q, q);
    double ld_sum = 0.0;
    Vector mean(q);
    Matrix cov(q, q);
    for (int i = lo; i < hi; ++i) {
      solve_loading_row(prior.row(i).transpose(), in.gamma_mean, *in.scatter,
                        in.cross->col(i), in.ridge, mean, cov);
      out.mean_rows.row(i) = mean.transpose();
      out.row_variances.row(i) = cov.diagonal().transpose();
      cov_sum += cov;
      ld_sum += Eigen::LDLT<Matrix>(cov).vectorD().array().log().sum();
    }
    cov_part[blk] = std::move(cov_sum);
    logdet_part[blk] = ld_sum;
  }
  out.row_covariance_sum = Matrix::Zero(q, q);
  out.sum_logdet = 0.0;
  for (int blk = 0; blk < nb; ++blk) {
    out.row_covariance_sum += cov_part[blk];
    out.sum_logdet += logdet_part[blk];
  }
  out.row_covariance_sum =
      (0.5 * (out.row_covariance_sum + out.row_covariance_sum.transpose())).eval();
}

}  // namespace rspca::kernels::omp
