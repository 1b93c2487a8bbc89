#pragma once

// Coordinate-ascent variational fit of the robust sparse probabilistic PCA
// model and its ablation variants (sparsity and/or robustness removed).
//
// By default every update is the exact mean-field coordinate step of the
// evidence bound returned by elbo(), which therefore never decreases along
// a sweep. FitConfig::literal_paper_updates switches the lambda-field,
// lambda-hyper, noise-weight and loading-mean updates to the published
// closed forms (whose GIG parameter orientation differs); in that mode the
// bound is still reported honestly but carries no monotonicity guarantee.

#include "rspca/types.hpp"

namespace rspca {

// PPCA-based start: loading means from the rank-q eigendecomposition of the
// sample covariance, noise precision from the discarded spectrum, unit
// robustness weights, one latent pass.
ModelState initialize(const Dataset& data, const FitConfig& config);

ModelState update_latent(ModelState state, const Dataset& data,
                         const FitConfig& config);
ModelState update_lambda_field(ModelState state, const FitConfig& config);
ModelState update_lambda_hyper(ModelState state, const FitConfig& config);
ModelState update_loadings(ModelState state, const Dataset& data,
                           const FitConfig& config);
ModelState update_noise(ModelState state, const Dataset& data,
                        const FitConfig& config);

// Variational free energy E[ln p(x, Theta)] - E[ln g(Theta)] under the
// mean-field factorization, with point-mass lambda and fixed (a0, b0).
double elbo(const ModelState& state, const Dataset& data, const FitConfig& config);

FittedModel fit(const Dataset& data, const FitConfig& config);

namespace detail {
// E[||x_t - A z_t||^2] for all t under the current posteriors; shared by the
// noise update and the evidence bound.
Vector residual_moments(const ModelState& state, const Dataset& data,
                        bool include_loading_cov);
// psi solving gig_mean(order, 1, psi) = 1; used to seed unit robustness weights.
double unit_mean_gig_psi(double order);
}  // namespace detail

}  // namespace rspca
