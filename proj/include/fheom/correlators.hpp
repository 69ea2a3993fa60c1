// correlators.hpp - system two-time correlations C_AB(t) = Tr[A rho'(t)], rho'(0) = B rho_S(0)
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fheom/heom.hpp"
#include "fheom/lindblad.hpp"

namespace fheom {

struct CorrelationResult {
  std::vector<double> times;
  std::vector<cplx> values;
  std::string solver;
};

// rho' is evolved as a general matrix; an even_standard hierarchy rejects odd rho'.
CorrelationResult system_correlation(const FockOperator& a, const FockOperator& b, const Hierarchy& h,
                                     const DenseMat& rho0, std::span<const double> t_grid,
                                     const IntegratorOptions& opts = {});
CorrelationResult system_correlation(const FockOperator& a, const FockOperator& b,
                                     const LindbladGenerator& gen, const DenseMat& rho0,
                                     std::span<const double> t_grid);

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> values;
  // exp(-t / damping_time) window, absent when undamped.
  std::optional<double> damping_time;
  double t_max = 0.0;
};

// S(w) = 2 Re int_0^T exp(i w t) C(t) w(t) dt by the trapezoid rule on a uniform grid.
Spectrum spectrum(const CorrelationResult& c, std::span<const double> omega,
                  std::optional<double> damping_time = std::nullopt);

}  // namespace fheom
