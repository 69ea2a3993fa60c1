#include "fheom/lindblad.hpp"

#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

namespace fheom {

SuperOperator dissipator(const FockOperator& o, Parity sector) {
  const double r = sector == Parity::even ? 2.0 : -2.0;
  const FockOperator od = o.adjoint();
  const FockOperator n = od * o;
  return r * (left_mul(o) * right_mul(od)) - left_mul(n) - right_mul(n);
}

namespace {

SuperOperator sector_generator(const FockOperator& h, const FockOperator& s, double gamma,
                               double n0, Parity sector) {
  return liouvillian(h) + gamma * ((1.0 - n0) * dissipator(s, sector) +
                                   n0 * dissipator(s.adjoint(), sector));
}

}  // namespace

LindbladGenerator::LindbladGenerator(FockOperator h_sys, FockOperator s, double gamma, double n0)
    : h_(std::move(h_sys)),
      s_(std::move(s)),
      gamma_(gamma),
      n0_(n0),
      even_(identity_super(1)),
      odd_(identity_super(1)) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    fail(ErrorCode::invalid_argument, "Lindblad rate must be finite and non-negative");
  if (!(n0 >= 0.0 && n0 <= 1.0)) fail(ErrorCode::invalid_argument, "n0 must lie in [0, 1]");
  if (!(h_.space == s_.space))
    fail(ErrorCode::invalid_argument, "coupling operator and Hamiltonian act on different spaces");
  if (parity_violation(s_, Parity::odd) > 1e-12)
    fail(ErrorCode::invalid_argument, "system coupling operator must have odd parity");
  if (parity_violation(h_, Parity::even) > 1e-12)
    fail(ErrorCode::invalid_argument, "system Hamiltonian must have even parity");
  even_ = sector_generator(h_, s_, gamma_, n0_, Parity::even);
  odd_ = sector_generator(h_, s_, gamma_, n0_, Parity::odd);
}

SuperOperator LindbladGenerator::full() const {
  return even_ * sector_projector(h_.space, Parity::even) +
         odd_ * sector_projector(h_.space, Parity::odd);
}

LindbladGenerator build_generator(FockOperator h_sys, FockOperator s, double gamma, double n0) {
  return LindbladGenerator(std::move(h_sys), std::move(s), gamma, n0);
}

std::vector<DenseMat> evolve_lindblad(const LindbladGenerator& gen, const DenseMat& rho0,
                                      std::span<const double> t_grid) {
  const Eigen::Index d = gen.hamiltonian().space.dim();
  if (rho0.rows() != d || rho0.cols() != d)
    fail(ErrorCode::invalid_argument, "initial state does not match the system space");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] >= t_grid[k - 1]))
      fail(ErrorCode::invalid_argument, "time grid must be non-decreasing");

  const DenseMat g_even(gen.block(Parity::even).matrix);
  const DenseMat g_odd(gen.block(Parity::odd).matrix);
  Vec even = vec(parity_project(rho0, Parity::even));
  Vec odd = vec(parity_project(rho0, Parity::odd));

  // Propagators cached per step length; uniform grids need a single pair.
  std::map<double, std::pair<DenseMat, DenseMat>> cache;
  std::vector<DenseMat> out;
  out.reserve(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (k > 0) {
      const double dt = t_grid[k] - t_grid[k - 1];
      if (dt > 0.0) {
        // Grid spacings that differ only by rounding share one propagator.
        auto it = cache.lower_bound(dt - 1e-13 * std::max(1.0, dt));
        if (it == cache.end() || std::abs(it->first - dt) > 1e-13 * std::max(1.0, dt))
          it = cache.emplace(dt, std::make_pair(DenseMat((g_even * dt).exp()),
                                                DenseMat((g_odd * dt).exp())))
                   .first;
        even = it->second.first * even;
        odd = it->second.second * odd;
      }
    }
    if (!even.allFinite() || !odd.allFinite())
      fail(ErrorCode::solver, "Lindblad propagation produced non-finite values");
    out.push_back(k == 0 ? rho0 : DenseMat(unvec(even + odd, d)));
  }
  return out;
}

}  // namespace fheom
