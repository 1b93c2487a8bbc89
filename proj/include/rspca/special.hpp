#pragma once

// Prior densities and special-function kernels shared by the model, the
// fitting engine and the monitoring layer. All functions are pure.

namespace rspca {

enum class MixtureKind { Loading, Noise };

// Log density of the Laplacian priors.
// Loading convention: ln sqrt(1/(2 lambda)) - sqrt(2/lambda)|v|.
// Noise convention:   ln sqrt(gamma/2)      - sqrt(2 gamma)|v|.
// Throws InputError for non-positive scale.
double laplace_logpdf(double value, double scale_param, MixtureKind kind);

// Mean of the generalized inverse Gaussian distribution GIG(omega, chi, psi):
//   sqrt(chi/psi) * K_{omega+1}(sqrt(chi psi)) / K_omega(sqrt(chi psi)).
// Bessel ratios are evaluated in log space; the result is always finite.
double gig_mean(double omega, double chi, double psi);

// E[1/X] for X ~ GIG(omega, chi, psi), same evaluation strategy.
double gig_mean_inverse(double omega, double chi, double psi);

// E[ln X] for X ~ GIG(-1/2, chi, psi); needs d/dnu ln K_nu at nu = 1/2,
// which reduces to the exponential integral E1.
double gig_mean_log_half(double chi, double psi);

// ln K_nu(x) for nu >= 0 (K is even in the order), overflow-safe.
double log_bessel_k(double nu, double x);

// Marginal density of the two-level Gaussian x inverse-Gamma hierarchy
// obtained by numeric quadrature over the mixing variable. Recovers the
// Laplacian densities above; kept as an independent validation route.
// Throws NumericError if the quadrature does not converge.
double scale_mixture_marginal(double value, double scale_param, MixtureKind kind);

// Quantile of the chi-square distribution, accurate to 1e-8 relative.
double chi_square_quantile(double prob, int dof);

// Quantile of Student's t distribution.
double student_t_quantile(double prob, int dof);

// Quantile of the F distribution with (d1, d2) degrees of freedom.
double fisher_f_quantile(double prob, int d1, int d2);

// digamma(x); used by the evidence bound for E[ln gamma] under a Gamma law.
double digamma(double x);

// exp(x) * E1(x) evaluated without overflow (continued fraction for large x).
double expx_e1(double x);

}  // namespace rspca
