#include "rspca/diagnose.hpp"

#include <cmath>

#include "rspca/monitor.hpp"
#include "rspca/special.hpp"

namespace rspca {

std::pair<std::optional<int>, Vector> isolate_latent(const FittedModel& model,
                                                     const Vector& x_raw,
                                                     double alpha, int phase1_n) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("isolate_latent: alpha must lie in (0,1)");
  }
  if (phase1_n < 3) throw InputError("isolate_latent: phase1_n >= 3");
  if (x_raw.size() != model.p()) {
    throw InputError("isolate_latent: sample length mismatch");
  }
  const Vector xc = x_raw - model.center;
  const SampleInference inf = infer_sample(model, xc);
  const int q = model.q();
  Vector scores(q);
  for (int j = 0; j < q; ++j) {
    scores(j) = inf.mean(j) * inf.mean(j) / inf.covariance(j, j);
  }
  const double nn = static_cast<double>(phase1_n);
  const double threshold =
      (nn + 1.0) / nn * fisher_f_quantile(1.0 - alpha, 1, phase1_n - 1);
  std::optional<int> index;
  double best = 0.0;
  for (int j = 0; j < q; ++j) {
    if (scores(j) > threshold && (!index || scores(j) > best)) {
      index = j;
      best = scores(j);
    }
  }
  return {index, scores};
}

bool test_loading_zero(const FittedModel& model, int i, int j, double alpha,
                       int phase1_n) {
  if (i < 0 || i >= model.p() || j < 0 || j >= model.q()) {
    throw InputError("test_loading_zero: index out of range");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("test_loading_zero: alpha must lie in (0,1)");
  }
  if (phase1_n < 2) throw InputError("test_loading_zero: phase1_n >= 2");
  const double mean = model.state.loading.mean_rows(i, j);
  const double var = model.state.loading.row_variances(i, j);
  if (mean == 0.0) return false;
  const double stat = std::abs(mean) / std::sqrt(var);
  return stat > student_t_quantile(1.0 - 0.5 * alpha, phase1_n - 1);
}

std::set<int> contributors(const FittedModel& model, int j, double alpha,
                           int phase1_n) {
  if (j < 0 || j >= model.q()) {
    throw InputError("contributors: latent index out of range");
  }
  std::set<int> s;
  for (int i = 0; i < model.p(); ++i) {
    if (test_loading_zero(model, i, j, alpha, phase1_n)) s.insert(i);
  }
  return s;
}

DiagnosisReport diagnose(const FittedModel& model, const Vector& x_raw,
                         double alpha, int phase1_n) {
  DiagnosisReport rep;
  rep.alpha = alpha;
  auto [index, scores] = isolate_latent(model, x_raw, alpha, phase1_n);
  rep.latent_index = index;
  rep.latent_scores = scores;
  if (index) {
    rep.contributors = contributors(model, *index, alpha, phase1_n);
  }
  return rep;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> loading_mask(
    const FittedModel& model, double alpha, int phase1_n) {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(model.p(), model.q());
  for (int i = 0; i < model.p(); ++i) {
    for (int j = 0; j < model.q(); ++j) {
      mask(i, j) = test_loading_zero(model, i, j, alpha, phase1_n);
    }
  }
  return mask;
}

}  // namespace rspca
