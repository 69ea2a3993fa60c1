#include "fheom/thermal.hpp"

#include <cmath>
#include <string>

namespace fheom {

InverseTemperature InverseTemperature::finite(double beta) {
  if (!std::isfinite(beta) || beta < 0.0)
    fail(ErrorCode::invalid_argument,
         "inverse temperature must be finite and non-negative, got " + std::to_string(beta));
  return InverseTemperature(beta, false);
}

double InverseTemperature::value() const {
  if (zero_t_) fail(ErrorCode::invalid_argument, "zero temperature has no finite beta");
  return beta_;
}

double fermi_dirac(double omega, const InverseTemperature& beta, double mu) {
  if (beta.is_zero_temperature()) {
    if (omega < mu) return 1.0;
    if (omega > mu) return 0.0;
    return 0.5;
  }
  const double x = beta.value() * (omega - mu);
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(x) + 1.0);
}

cplx fermi_dirac(cplx omega, double beta, double mu) {
  const cplx x = beta * (omega - mu);
  if (x.real() > 0.0) {
    const cplx e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(x) + 1.0);
}

}  // namespace fheom
