#pragma once

// Post-alarm fault isolation: which latent direction moved, and which
// observed variables load on it.

#include <optional>
#include <set>
#include <utility>

#include "rspca/types.hpp"

namespace rspca {

struct DiagnosisReport {
  std::optional<int> latent_index;  // 0-based component, none if no flag
  Vector latent_scores;             // per-component standardized squared scores
  std::set<int> contributors;       // 0-based variable indices
  double alpha = 0.0;
};

// Per-component scores s_j = <z_tau>_j^2 / (Sigma_{z_tau})_{jj}; a component
// is flagged when s_j exceeds ((n+1)/n) F_{1-alpha}(1, n-1) with n = phase1_n.
// Returns the highest-scoring flagged component (single-fault reading).
std::pair<std::optional<int>, Vector> isolate_latent(const FittedModel& model,
                                                     const Vector& x_raw,
                                                     double alpha, int phase1_n);

// Two-sided t test of H0: A_ij = 0 using the loading posterior;
// true means the loading is significantly nonzero.
bool test_loading_zero(const FittedModel& model, int i, int j, double alpha,
                       int phase1_n);

// S = { i : loading (i, j) tests nonzero }.
std::set<int> contributors(const FittedModel& model, int j, double alpha,
                           int phase1_n);

DiagnosisReport diagnose(const FittedModel& model, const Vector& x_raw,
                         double alpha, int phase1_n);

// Zero/nonzero mask over all loadings from the hypothesis test.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> loading_mask(
    const FittedModel& model, double alpha, int phase1_n);

}  // namespace rspca
