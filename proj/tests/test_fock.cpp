#include "doctest.h"
#include "support.hpp"

#include "fheom/fock.hpp"

using namespace fheom;
using fheom::testing::max_abs;

namespace {

DenseMat anticommutator(const FockOperator& a, const FockOperator& b) {
  return (a * b + b * a).dense();
}

}  // namespace

TEST_CASE("fock space dimension and mode bounds") {
  CHECK(FockSpace(1).dim() == 2);
  CHECK(FockSpace(3).dim() == 8);
  CHECK_THROWS_AS(FockSpace(0), Error);
  CHECK_THROWS_AS(FockSpace(25), Error);
  const FockSpace space(2);
  CHECK_THROWS_AS(annihilation_op(space, 2), Error);
  CHECK_THROWS_AS(annihilation_op(space, -1), Error);
}

TEST_CASE("canonical anticommutation relations hold for every mode pair") {
  for (int n : {1, 2, 3, 4}) {
    const FockSpace space(n);
    const DenseMat id = identity_op(space).dense();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto ci = annihilation_op(space, i);
        const auto cj = annihilation_op(space, j);
        CHECK(max_abs(anticommutator(ci, cj.adjoint()) - (i == j ? id : DenseMat::Zero(id.rows(), id.cols()))) ==
              0.0);
        CHECK(max_abs(anticommutator(ci, cj)) == 0.0);
      }
  }
}

TEST_CASE("mode 0 is the leftmost Jordan-Wigner factor") {
  const FockSpace space(2);
  // |b=3> has both modes filled; removing mode 1 passes over mode 0.
  const DenseMat c1 = annihilation_op(space, 1).dense();
  CHECK(c1(1, 3) == cplx{-1.0, 0.0});
  const DenseMat c0 = annihilation_op(space, 0).dense();
  CHECK(c0(2, 3) == cplx{1.0, 0.0});
  CHECK(creation_op(space, 0).dense() == c0.adjoint());
}

TEST_CASE("number and parity operators are diagonal with the expected entries") {
  const FockSpace space(3);
  const DenseMat p = parity_op(space).dense();
  for (Eigen::Index b = 0; b < space.dim(); ++b) {
    CHECK(p(b, b).real() == (parity_of(b) == Parity::even ? 1.0 : -1.0));
    CHECK(number_op(space, 1).dense()(b, b).real() == double((b >> 1) & 1));
  }
  CHECK(parity_violation(number_op(space, 2), Parity::even) == 0.0);
  CHECK(parity_violation(annihilation_op(space, 2), Parity::odd) == 0.0);
  CHECK(parity_violation(annihilation_op(space, 2), Parity::even) == 1.0);
}

TEST_CASE("parity projection splits any operator into its two sectors") {
  std::mt19937 rng(11);
  const FockSpace space(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMat m = fheom::testing::random_matrix(space.dim(), rng);
    const DenseMat e = parity_project(m, Parity::even);
    const DenseMat o = parity_project(m, Parity::odd);
    CHECK(max_abs(e + o - m) < 1e-15);
    CHECK(parity_violation(e, Parity::even) == 0.0);
    CHECK(parity_violation(o, Parity::odd) == 0.0);
    // Products of two odd operators are even.
    CHECK(parity_violation(DenseMat(o * o), Parity::even) < 1e-15);
  }
}

TEST_CASE("quadratic hamiltonian is hermitian and carries the hopping amplitude") {
  const FockSpace space(2);
  const std::vector<double> e{0.3, -0.7};
  const std::vector<Hopping> hop{{0, 1, cplx{0.2, 0.1}}};
  const DenseMat h = quadratic_hamiltonian(space, e, hop).dense();
  CHECK(max_abs(h - h.adjoint()) == 0.0);
  CHECK(parity_violation(h, Parity::even) == 0.0);
  // <mode1 occupied| h |mode0 occupied> = t.
  CHECK(std::abs(h(2, 1) - cplx{0.2, 0.1}) < 1e-15);
  CHECK(h(3, 3).real() == doctest::Approx(-0.4));
  CHECK_THROWS_AS(quadratic_hamiltonian(space, std::vector<double>{1.0}), Error);
}

TEST_CASE("thermal and occupation states") {
  const FockSpace space(2);
  const std::vector<double> e{0.5, -0.25};
  const auto beta = InverseTemperature::finite(1.7);
  const DensityMatrix rho = thermal_state(space, e, beta, 0.1);
  CHECK(std::abs(rho.matrix.trace() - 1.0) < 1e-15);
  for (int k = 0; k < 2; ++k) {
    const cplx n = (number_op(space, k).dense() * rho.matrix).trace();
    CHECK(n.real() == doctest::Approx(fermi_dirac(e[k], beta, 0.1)).epsilon(1e-14));
  }
  const std::vector<int> occ{0, 1};
  const DensityMatrix b = occupation_state(space, occ);
  CHECK(b.matrix(2, 2) == cplx{1.0, 0.0});
  CHECK(std::abs(b.matrix.trace() - 1.0) == 0.0);
  const std::vector<int> bad{0, 2};
  CHECK_THROWS_AS(occupation_state(space, bad), Error);
}

TEST_CASE("fermi dirac is stable at large beta and a step at zero temperature") {
  const auto hot = InverseTemperature::finite(1e6);
  CHECK(fermi_dirac(1.0, hot, 0.0) == 0.0);
  CHECK(fermi_dirac(-1.0, hot, 0.0) == 1.0);
  const auto zero = InverseTemperature::zero_temperature();
  CHECK(fermi_dirac(0.2, zero, 0.0) == 0.0);
  CHECK(fermi_dirac(-0.2, zero, 0.0) == 1.0);
  CHECK(fermi_dirac(0.0, zero, 0.0) == 0.5);
  CHECK(fermi_dirac(0.3, InverseTemperature::finite(0.0), 0.0) == 0.5);
  CHECK_THROWS_AS(InverseTemperature::finite(-1.0), Error);
  CHECK_THROWS_AS(zero.value(), Error);
}
