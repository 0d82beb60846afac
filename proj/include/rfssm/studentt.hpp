#pragma once

#include <cmath>

namespace rfssm {

class Rng;

// Parameters of the predictive Student's t in the form the conjugate update
// produces them: `scale` is the quantity multiplying the squared residual in
// the density kernel (1 + (y-loc)^2/scale)^{-(dof+1)/2}. In the standard
// three-parameter form this corresponds to spread = sqrt(scale/dof).
struct StudentTParams {
  double dof = 0.0;
  double location = 0.0;
  double scale = 0.0;

  double spread() const { return std::sqrt(scale / dof); }
  // Variance of the predictive; only finite for dof > 2.
  double variance() const { return scale / (dof - 2.0); }
  void validate() const;  // throws NumericalError
};

// Fully normalized log density at y.
double t_log_density(double y, const StudentTParams& p);

// Draw location + spread * T with T standard Student's t.
double t_sample(const StudentTParams& p, Rng& rng);

// CDF / quantile (used for confidence bands and scoring, not in hot loops).
double t_cdf(double y, const StudentTParams& p);
double t_quantile(double prob, const StudentTParams& p);

// Evaluator with the y-independent part of the log density precomputed, for
// loops that score many points against one set of params.
class TLogDensity {
 public:
  explicit TLogDensity(const StudentTParams& p);
  double operator()(double y) const {
    const double r = y - location_;
    return constant_ - exponent_ * std::log1p(r * r * inv_scale_);
  }

 private:
  double location_, inv_scale_, exponent_, constant_;
};

}  // namespace rfssm
