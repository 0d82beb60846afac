#include "rfssm/studentt.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>

#include "rfssm/errors.hpp"
#include "rfssm/rng.hpp"

namespace rfssm {

void StudentTParams::validate() const {
  if (!(dof > 0.0) || !std::isfinite(dof))
    throw NumericalError("student t: dof must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw NumericalError("student t: scale must be positive");
  if (!std::isfinite(location))
    throw NumericalError("student t: location must be finite");
}

double t_log_density(double y, const StudentTParams& p) {
  const double r = y - p.location;
  return std::lgamma(0.5 * (p.dof + 1.0)) - std::lgamma(0.5 * p.dof) -
         0.5 * std::log(std::numbers::pi * p.scale) -
         0.5 * (p.dof + 1.0) * std::log1p(r * r / p.scale);
}

double t_sample(const StudentTParams& p, Rng& rng) {
  return p.location + p.spread() * rng.student_t(p.dof);
}

double t_cdf(double y, const StudentTParams& p) {
  boost::math::students_t dist(p.dof);
  return boost::math::cdf(dist, (y - p.location) / p.spread());
}

double t_quantile(double prob, const StudentTParams& p) {
  boost::math::students_t dist(p.dof);
  return p.location + p.spread() * boost::math::quantile(dist, prob);
}

TLogDensity::TLogDensity(const StudentTParams& p)
    : location_(p.location),
      inv_scale_(1.0 / p.scale),
      exponent_(0.5 * (p.dof + 1.0)),
      constant_(std::lgamma(0.5 * (p.dof + 1.0)) - std::lgamma(0.5 * p.dof) -
                0.5 * std::log(std::numbers::pi * p.scale)) {}

}  // namespace rfssm
