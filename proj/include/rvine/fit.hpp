#pragma once

#include "rvine/eval.hpp"

namespace rvine {

struct MleReport {
  RVineModel model;
  double loglik_seq = 0.0;  // log likelihood of the starting parameters
  double loglik_mle = 0.0;
  std::size_t n_params = 0;
  double aic = 0.0, bic = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Joint maximization of the model log likelihood over every free copula
// parameter, starting from the parameters in `start`. Families and structure
// stay fixed. The line search only accepts improvements, so loglik_mle never
// falls below loglik_seq.
MleReport fit_mle(const RVineModel& start, const CopulaSample& data);

enum class VuongCorrection { none, akaike, schwarz };

struct VuongResult {
  double statistic = 0.0;
  double p_value = 0.0;
  int favored = 0;  // +1 first model, -1 second model, 0 inconclusive
};

// Paired comparison of two models on common data via the normalized sum of
// per-row log density differences; the correction penalizes parameter-count
// differences.
VuongResult vuong(const RVineModel& a, const RVineModel& b,
                  const CopulaSample& data,
                  VuongCorrection correction = VuongCorrection::none);

}  // namespace rvine
