#pragma once

#include <Eigen/Core>
#include <vector>

namespace rfssm {

class Rng;

struct NormalizeResult {
  Eigen::VectorXd weights;        // sums to 1 up to floating error
  double log_evidence_increment;  // logsumexp(logw) - log M
};

// Softmax with max-shift. Throws NumericalError when every entry is -inf
// (or any entry is NaN). The evidence increment is the particle estimate of
// log p(y_t | Y_{t-1}) when logw are per-stream predictive log densities.
NormalizeResult normalize_log_weights(const Eigen::VectorXd& log_weights);

// 1 / sum w_i^2, in [1, M] for normalized weights.
double effective_sample_size(const Eigen::VectorXd& weights);

// Systematic resampling: one uniform offset, stride 1/M. Expected
// multiplicity of index i is M * w_i; with equal weights the result is
// exactly the identity mapping.
std::vector<int> systematic_resample(const Eigen::VectorXd& weights, int count,
                                     Rng& rng);

// Posterior-weighted mean of the rows of `states` (M x d).
Eigen::VectorXd mmse_estimate(const Eigen::MatrixXd& states,
                              const Eigen::VectorXd& weights);

}  // namespace rfssm
