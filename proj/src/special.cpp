#include "rspca/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_expint.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <mutex>
#include <string>

#include "rspca/errors.hpp"

namespace rspca {

namespace {

// GSL aborts on error by default; switch that off once, process-wide.
void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

double laplace_logpdf(double value, double scale_param, MixtureKind kind) {
  if (!(scale_param > 0.0)) {
    throw InputError("laplace_logpdf: scale parameter must be positive");
  }
  if (kind == MixtureKind::Loading) {
    const double lambda = scale_param;
    return 0.5 * std::log(1.0 / (2.0 * lambda)) -
           std::sqrt(2.0 / lambda) * std::abs(value);
  }
  const double gamma = scale_param;
  return 0.5 * std::log(gamma / 2.0) - std::sqrt(2.0 * gamma) * std::abs(value);
}

double log_bessel_k(double nu, double x) {
  disable_gsl_abort();
  nu = std::abs(nu);
  gsl_sf_result r;
  const int status = gsl_sf_bessel_lnKnu_e(nu, x, &r);
  if (status != GSL_SUCCESS) {
    throw NumericError("log_bessel_k failed at nu=" + std::to_string(nu) +
                       " x=" + std::to_string(x));
  }
  return r.val;
}

double gig_mean(double omega, double chi, double psi) {
  if (!(chi > 0.0) || !(psi > 0.0)) {
    throw InputError("gig_mean: chi and psi must be positive");
  }
  const double root = std::sqrt(chi / psi);
  // K_{1/2} = K_{-1/2}, so the ratio collapses for omega = -1/2.
  if (omega == -0.5) return root;
  const double u = std::sqrt(chi * psi);
  if (omega == 0.5) return root * (1.0 + 1.0 / u);
  const double ratio = std::exp(log_bessel_k(omega + 1.0, u) - log_bessel_k(omega, u));
  const double m = root * ratio;
  if (!std::isfinite(m)) {
    throw NumericError("gig_mean: non-finite result");
  }
  return m;
}

double gig_mean_inverse(double omega, double chi, double psi) {
  if (!(chi > 0.0) || !(psi > 0.0)) {
    throw InputError("gig_mean_inverse: chi and psi must be positive");
  }
  const double root = std::sqrt(psi / chi);
  const double u = std::sqrt(chi * psi);
  if (omega == -0.5) return root * (1.0 + 1.0 / u);
  if (omega == 0.5) return root;
  const double ratio = std::exp(log_bessel_k(omega - 1.0, u) - log_bessel_k(omega, u));
  return root * ratio;
}

double expx_e1(double x) {
  disable_gsl_abort();
  if (x <= 0.0) throw InputError("expx_e1: x must be positive");
  if (x < 30.0) {
    gsl_sf_result r;
    if (gsl_sf_expint_E1_e(x, &r) != GSL_SUCCESS) {
      throw NumericError("expx_e1: E1 evaluation failed");
    }
    return std::exp(x) * r.val;
  }
  // Modified Lentz continued fraction for exp(x) E1(x) = 1/(x+1-1/(x+3-4/(...)))
  const double tiny = 1e-300;
  double f = tiny, c = f, d = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double a = (k == 0) ? 1.0 : -static_cast<double>(k) * k;
    const double b = x + 2.0 * k + 1.0;
    d = b + a * d;
    if (d == 0.0) d = tiny;
    c = b + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

double gig_mean_log_half(double chi, double psi) {
  // For nu = +-1/2: d/dnu ln K_nu(u)|_{nu=1/2} = exp(2u) E1(2u), and
  // E[ln X] = (1/2) ln(chi/psi) + d/dnu ln K_nu |_{nu=omega}. K is even in nu,
  // so at omega = -1/2 the derivative flips sign.
  const double u = std::sqrt(chi * psi);
  return 0.5 * std::log(chi / psi) - expx_e1(2.0 * u);
}

double scale_mixture_marginal(double value, double scale_param, MixtureKind kind) {
  if (!(scale_param > 0.0)) {
    throw InputError("scale_mixture_marginal: scale parameter must be positive");
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  double result = 0.0, err = 0.0, l1 = 0.0;
  const double v2 = value * value;
  if (kind == MixtureKind::Loading) {
    // First level: A | Lambda ~ N(0, 2/Lambda). Second level: Lambda ~
    // inverse-Gamma(shape 1, scale 2/lambda). Marginal is the loading Laplacian.
    const double lambda = scale_param;
    const double s = 2.0 / lambda;
    auto f = [&](double L) {
      const double g = std::sqrt(L / (4.0 * M_PI)) * std::exp(-0.25 * L * v2);
      const double h = s / (L * L) * std::exp(-s / L);
      return g * h;
    };
    result = integrator.integrate(f, 1e-9, &err, &l1);
  } else {
    // First level: eps | Gamma ~ N(0, 1/(2 Gamma gamma)). Second level:
    // Gamma ~ inverse-Gamma(shape 1, scale 1/2). Marginal is the noise Laplacian.
    const double gamma = scale_param;
    auto f = [&](double G) {
      const double g = std::sqrt(G * gamma / M_PI) * std::exp(-G * gamma * v2);
      const double h = 0.5 / (G * G) * std::exp(-0.5 / G);
      return g * h;
    };
    result = integrator.integrate(f, 1e-9, &err, &l1);
  }
  if (!std::isfinite(result) || (l1 > 0.0 && err > 1e-7 * std::max(1.0, l1))) {
    throw NumericError("scale_mixture_marginal: quadrature did not converge (err=" +
                       std::to_string(err) + ")");
  }
  return result;
}

double chi_square_quantile(double prob, int dof) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw InputError("chi_square_quantile: prob must lie in (0,1)");
  }
  if (dof < 1) throw InputError("chi_square_quantile: dof must be positive");
  boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::quantile(dist, prob);
}

double student_t_quantile(double prob, int dof) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw InputError("student_t_quantile: prob must lie in (0,1)");
  }
  if (dof < 1) throw InputError("student_t_quantile: dof must be positive");
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, prob);
}

double fisher_f_quantile(double prob, int d1, int d2) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw InputError("fisher_f_quantile: prob must lie in (0,1)");
  }
  if (d1 < 1 || d2 < 1) throw InputError("fisher_f_quantile: dof must be positive");
  boost::math::fisher_f_distribution<double> dist(d1, d2);
  return boost::math::quantile(dist, prob);
}

double digamma(double x) { return boost::math::digamma(x); }

}  // namespace rspca
