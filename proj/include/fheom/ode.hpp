// ode.hpp - adaptive Dormand-Prince 4(5) for complex vector ODEs, fourth-order dense output
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fheom/types.hpp"

namespace fheom {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 picks a step from the first derivative
  double max_step = 0.0;      // 0 means unbounded
  std::size_t max_steps = 5'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

using Rhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

// Solution sampled at every point of a non-decreasing t_grid whose first entry is the start time.
// Throws Error(solver) on step-size underflow, step budget exhaustion or non-finite values.
std::vector<Vec> integrate(const Rhs& f, const Vec& y0, std::span<const double> t_grid,
                           const IntegratorOptions& opts, IntegratorStats* stats = nullptr);

}  // namespace fheom
