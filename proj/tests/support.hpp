// Shared helpers for the unit tests.
#pragma once

#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fheom/fock.hpp"

namespace fheom::testing {

inline double trace_distance(const DenseMat& a, const DenseMat& b) {
  const DenseMat d = a - b;
  const Eigen::SelfAdjointEigenSolver<DenseMat> eig(0.5 * (d + d.adjoint()));
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

inline double max_abs(const DenseMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  return t;
}

inline DenseMat random_matrix(Eigen::Index d, std::mt19937& rng) {
  std::normal_distribution<double> n01;
  DenseMat m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx{n01(rng), n01(rng)};
  return m;
}

inline DenseMat random_density(Eigen::Index d, std::mt19937& rng) {
  const DenseMat x = random_matrix(d, rng);
  DenseMat rho = x * x.adjoint();
  return rho / rho.trace();
}

// One system mode at energy w, coupled through its annihilator.
struct SingleMode {
  FockSpace space{1};
  FockOperator c = annihilation_op(space, 0);
  FockOperator h;

  explicit SingleMode(double w) : h(w * number_op(space, 0)) {}

  DenseMat projector(int occupation) const {
    DenseMat p = DenseMat::Zero(2, 2);
    p(occupation, occupation) = 1.0;
    return p;
  }
};

}  // namespace fheom::testing
