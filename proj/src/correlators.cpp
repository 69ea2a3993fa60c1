#include "fheom/correlators.hpp"

#include <cmath>

#include "fheom/parallel.hpp"

namespace fheom {

namespace {

DenseMat displaced_state(const FockOperator& a, const FockOperator& b, Eigen::Index dim,
                         const DenseMat& rho0) {
  if (a.space.dim() != dim || b.space.dim() != dim || rho0.rows() != dim || rho0.cols() != dim)
    fail(ErrorCode::invalid_argument, "correlation operators do not match the system space");
  return b.dense() * rho0;
}

CorrelationResult trace_against(const FockOperator& a, std::span<const double> t_grid,
                                const std::vector<DenseMat>& states, std::string solver) {
  CorrelationResult out{{t_grid.begin(), t_grid.end()}, {}, std::move(solver)};
  const DenseMat ad = a.dense();
  out.values.reserve(states.size());
  for (const auto& rho : states) out.values.push_back((ad * rho).trace());
  return out;
}

}  // namespace

CorrelationResult system_correlation(const FockOperator& a, const FockOperator& b, const Hierarchy& h,
                                     const DenseMat& rho0, std::span<const double> t_grid,
                                     const IntegratorOptions& opts) {
  const DenseMat start = displaced_state(a, b, h.system_dim(), rho0);
  if (h.options().mode == HierarchyMode::even_standard &&
      parity_violation(start, Parity::even) > 1e-12)
    fail(ErrorCode::unsupported_sector,
         "B rho_S(0) has odd parity; the even-standard hierarchy cannot evolve it, use the "
         "generalized hierarchy");
  const auto traj = evolve_heom(h, start, t_grid, opts);
  return trace_against(a, t_grid, traj.rho, "heom");
}

CorrelationResult system_correlation(const FockOperator& a, const FockOperator& b,
                                     const LindbladGenerator& gen, const DenseMat& rho0,
                                     std::span<const double> t_grid) {
  const DenseMat start = displaced_state(a, b, gen.hamiltonian().space.dim(), rho0);
  return trace_against(a, t_grid, evolve_lindblad(gen, start, t_grid), "lindblad");
}

Spectrum spectrum(const CorrelationResult& c, std::span<const double> omega,
                  std::optional<double> damping_time) {
  const std::size_t n = c.times.size();
  if (n != c.values.size()) fail(ErrorCode::invalid_argument, "correlation series length mismatch");
  if (n < 2) fail(ErrorCode::invalid_argument, "spectrum needs at least two time points");
  if (damping_time && !(*damping_time > 0.0))
    fail(ErrorCode::invalid_argument, "damping time must be positive");
  const double dt = c.times[1] - c.times[0];
  if (!(dt > 0.0)) fail(ErrorCode::invalid_argument, "time grid must be increasing");
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs((c.times[k] - c.times[k - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      fail(ErrorCode::invalid_argument, "spectrum requires a uniform time grid");

  std::vector<cplx> weighted(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = c.times[k] - c.times[0];
    const double w = damping_time ? std::exp(-t / *damping_time) : 1.0;
    weighted[k] = (k == 0 || k + 1 == n ? 0.5 : 1.0) * w * c.values[k];
  }

  Spectrum out{{omega.begin(), omega.end()}, std::vector<double>(omega.size()), damping_time,
               c.times.back() - c.times.front()};
  parallel_for(omega.size(), [&](std::size_t i) {
    cplx acc{};
    for (std::size_t k = 0; k < n; ++k)
      acc += std::exp(I * omega[i] * (c.times[k] - c.times[0])) * weighted[k];
    out.values[i] = 2.0 * (acc * dt).real();
  });
  return out;
}

}  // namespace fheom
