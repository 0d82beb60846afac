#include "rfssm/particles.hpp"

#include <cmath>
#include <limits>

#include "rfssm/errors.hpp"
#include "rfssm/rng.hpp"

namespace rfssm {

NormalizeResult normalize_log_weights(const Eigen::VectorXd& log_weights) {
  const auto m = log_weights.size();
  if (m == 0) throw ConfigError("normalize_log_weights: empty weight vector");
  double max_log = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isnan(log_weights[i]))
      throw NumericalError("normalize_log_weights: NaN log weight");
    max_log = std::max(max_log, log_weights[i]);
  }
  if (!std::isfinite(max_log))
    throw NumericalError("normalize_log_weights: all weights are zero (degenerate)");

  NormalizeResult out;
  out.weights = (log_weights.array() - max_log).exp();
  const double sum = out.weights.sum();
  out.weights /= sum;
  out.log_evidence_increment =
      max_log + std::log(sum) - std::log(static_cast<double>(m));
  return out;
}

double effective_sample_size(const Eigen::VectorXd& weights) {
  return 1.0 / weights.squaredNorm();
}

std::vector<int> systematic_resample(const Eigen::VectorXd& weights, int count,
                                     Rng& rng) {
  const int m = static_cast<int>(weights.size());
  std::vector<int> indices(count);
  const double offset = rng.uniform();
  double cumulative = weights[0];
  int j = 0;
  for (int i = 0; i < count; ++i) {
    const double position = (static_cast<double>(i) + offset) / count;
    while (position > cumulative && j + 1 < m) {
      ++j;
      cumulative += weights[j];
    }
    indices[i] = j;
  }
  return indices;
}

Eigen::VectorXd mmse_estimate(const Eigen::MatrixXd& states,
                              const Eigen::VectorXd& weights) {
  return states.transpose() * weights;
}

}  // namespace rfssm
