// fock.hpp - Jordan-Wigner fermion operators on 2^N Fock spaces
//
// Basis state |b> is the bitmask b with mode k at bit k. Mode 0 is the leftmost
// factor of every string: c_k = Z_0 ... Z_{k-1} sigma^-_k.
#pragma once

#include <bit>
#include <cstddef>
#include <span>

#include "fheom/thermal.hpp"
#include "fheom/types.hpp"

namespace fheom {

class FockSpace {
 public:
  explicit FockSpace(int n_modes);

  int n_modes() const noexcept { return n_modes_; }
  Eigen::Index dim() const noexcept { return Eigen::Index{1} << n_modes_; }

  friend bool operator==(const FockSpace&, const FockSpace&) = default;

 private:
  int n_modes_;
};

struct FockOperator {
  FockSpace space;
  SparseMat matrix;

  FockOperator(FockSpace sp, SparseMat m);

  FockOperator adjoint() const;
  DenseMat dense() const { return DenseMat(matrix); }

  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);
  FockOperator& operator*=(cplx z);
};

FockOperator operator+(FockOperator a, const FockOperator& b);
FockOperator operator-(FockOperator a, const FockOperator& b);
FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator operator*(cplx z, FockOperator a);

struct DensityMatrix {
  FockSpace space;
  DenseMat matrix;

  DensityMatrix(FockSpace sp, DenseMat m);
};

FockOperator identity_op(const FockSpace& space);
FockOperator zero_op(const FockSpace& space);
FockOperator annihilation_op(const FockSpace& space, int mode);
FockOperator creation_op(const FockSpace& space, int mode);
FockOperator number_op(const FockSpace& space, int mode);
FockOperator parity_op(const FockSpace& space);

// Parity sector of a basis state.
inline Parity parity_of(Eigen::Index basis_state) {
  return std::popcount(static_cast<unsigned long long>(basis_state)) % 2 == 0 ? Parity::even
                                                                               : Parity::odd;
}

// O^e keeps the blocks between equal-parity states, O^o the blocks between opposite ones.
FockOperator parity_project(const FockOperator& op, Parity sector);
DenseMat parity_project(const DenseMat& m, Parity sector);

// Largest entry of the component in the other sector, relative to the largest entry overall.
double parity_violation(const DenseMat& m, Parity expected);
double parity_violation(const FockOperator& op, Parity expected);

struct Hopping {
  int from;
  int to;
  cplx amplitude;
};

// sum_k e_k n_k + sum (t c_to^dagger c_from + h.c.)
FockOperator quadratic_hamiltonian(const FockSpace& space, std::span<const double> energies,
                                   std::span<const Hopping> hoppings = {});

// Product state prod_k exp(-beta (w_k - mu) n_k) / Z.
DensityMatrix thermal_state(const FockSpace& space, std::span<const double> energies,
                            const InverseTemperature& beta, double mu);

// |b><b| for the occupation pattern given as one 0/1 entry per mode.
DensityMatrix occupation_state(const FockSpace& space, std::span<const int> occupations);

}  // namespace fheom
