// thermal.hpp - inverse temperature and Fermi-Dirac occupation
#pragma once

#include "fheom/types.hpp"

namespace fheom {

// Inverse temperature with an explicit zero-temperature state instead of beta = inf.
class InverseTemperature {
 public:
  static InverseTemperature finite(double beta);
  static InverseTemperature zero_temperature() { return InverseTemperature(0.0, true); }

  bool is_zero_temperature() const noexcept { return zero_t_; }
  // Throws for the zero-temperature state.
  double value() const;

  friend bool operator==(const InverseTemperature&, const InverseTemperature&) = default;

 private:
  InverseTemperature(double beta, bool zero_t) : beta_(beta), zero_t_(zero_t) {}
  double beta_;
  bool zero_t_;
};

// 1 / (exp(beta (omega - mu)) + 1), evaluated without overflow.
double fermi_dirac(double omega, const InverseTemperature& beta, double mu);

// Same function continued to complex energies.
cplx fermi_dirac(cplx omega, double beta, double mu);

}  // namespace fheom
