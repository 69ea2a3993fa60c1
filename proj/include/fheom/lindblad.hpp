// lindblad.hpp - Markovian generator with parity-dependent jump sign
//
// d rho^r/dt = -i[H, rho^r] + Gamma [(1 - n0) D^r_s + n0 D^r_{s^dagger}] rho^r,
// D^r[.] = 2r O . O^dagger - O^dagger O . - . O^dagger O, r = +1 even sector, -1 odd sector.
#pragma once

#include <span>
#include <vector>

#include "fheom/fock.hpp"
#include "fheom/superop.hpp"

namespace fheom {

class LindbladGenerator {
 public:
  LindbladGenerator(FockOperator h_sys, FockOperator s, double gamma, double n0);

  const SuperOperator& block(Parity sector) const {
    return sector == Parity::even ? even_ : odd_;
  }
  // Sector blocks combined with their projectors.
  SuperOperator full() const;

  const FockOperator& hamiltonian() const { return h_; }
  const FockOperator& coupling() const { return s_; }
  double gamma() const { return gamma_; }
  double n0() const { return n0_; }

 private:
  FockOperator h_;
  FockOperator s_;
  double gamma_;
  double n0_;
  SuperOperator even_;
  SuperOperator odd_;
};

LindbladGenerator build_generator(FockOperator h_sys, FockOperator s, double gamma, double n0);

// D^r_O as a superoperator.
SuperOperator dissipator(const FockOperator& o, Parity sector);

std::vector<DenseMat> evolve_lindblad(const LindbladGenerator& gen, const DenseMat& rho0,
                                      std::span<const double> t_grid);

}  // namespace fheom
