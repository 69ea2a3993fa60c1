// oracle.hpp - exact references: system plus discrete bath, parity-aware reduction, Wick checks
//
// Global Jordan-Wigner order puts environment modes first, so a global basis index is
// e + 2^{N_E} s and system operators embed as O^e (x) 1 + O^o (x) P_E.
#pragma once

#include <span>
#include <vector>

#include "fheom/bath.hpp"
#include "fheom/fock.hpp"
#include "fheom/superop.hpp"

namespace fheom {

inline constexpr int kMaxOracleModes = 12;

class CompositeModel {
 public:
  CompositeModel(std::vector<BathMode> modes, FockOperator h_sys, FockOperator s,
                 InverseTemperature beta, double mu, DenseMat rho_sys0);

  const FockSpace& env_space() const { return env_; }
  const FockSpace& sys_space() const { return sys_; }
  const FockSpace& global_space() const { return global_; }
  const std::vector<BathMode>& modes() const { return modes_; }
  const InverseTemperature& beta() const { return beta_; }
  double mu() const { return mu_; }
  const FockOperator& system_hamiltonian() const { return h_sys_; }
  const FockOperator& coupling() const { return s_; }
  const DenseMat& system_initial_state() const { return rho_sys0_; }

  const FockOperator& hamiltonian() const { return h_full_; }
  const FockOperator& interaction() const { return h_int_; }
  const DenseMat& initial_state() const { return rho0_; }

  FockOperator embed_system(const FockOperator& op) const;
  DenseMat embed_system(const DenseMat& op) const;
  FockOperator env_annihilation(int k) const;
  FockOperator env_parity() const;

 private:
  std::vector<BathMode> modes_;
  FockOperator h_sys_;
  FockOperator s_;
  InverseTemperature beta_;
  double mu_;
  DenseMat rho_sys0_;
  FockSpace env_;
  FockSpace sys_;
  FockSpace global_;
  FockOperator h_int_;
  FockOperator h_full_;
  DenseMat rho0_;
};

CompositeModel build_composite(std::vector<BathMode> modes, FockOperator h_sys, FockOperator s,
                               InverseTemperature beta, double mu, DenseMat rho_sys0);

// Unitary evolution of the full model from one eigendecomposition of H_full.
class ExactEvolution {
 public:
  explicit ExactEvolution(const CompositeModel& model);

  DenseMat propagator(double t) const;
  DenseMat state(double t) const;
  // U X U^dagger for an arbitrary global operator X.
  DenseMat evolve(const DenseMat& x, double t) const;

 private:
  DenseMat vectors_;
  Eigen::VectorXd energies_;
  DenseMat rho0_;
};

DenseMat evolve_exact(const CompositeModel& model, double t);

// Equal-parity system elements use the plain trace, opposite-parity ones weight
// environment configuration w by (-1)^{|w|}.
DenseMat reduce_parity_aware(int n_env, int n_sys, const DenseMat& rho_full);
DenseMat reduce_parity_aware(const CompositeModel& model, const DenseMat& rho_full);
DenseMat plain_partial_trace(int n_env, int n_sys, const DenseMat& rho_full);

enum class Action { left = 1, right = -1 };

// lambda = +1 inserts B^dagger(t), lambda = -1 inserts B(t).
struct FieldInsertion {
  bool dagger;
  Action action;
  double time;
};

// Insertions listed left to right as written, B_n ... B_1.
using SuperCorrelationQuery = std::vector<FieldInsertion>;

class BathCorrelator {
 public:
  BathCorrelator(std::vector<BathMode> modes, InverseTemperature beta, double mu);

  // Tr_E[T_E B_n ... B_1 rho_eq]; odd n gives exactly 0.
  cplx super_correlation(const SuperCorrelationQuery& query) const;
  // Sum over full contractions with crossing sign; throws for odd n.
  cplx wick_pairing_sum(const SuperCorrelationQuery& query) const;

 private:
  DenseMat field(bool dagger, double t) const;

  std::vector<BathMode> modes_;
  FockSpace space_;
  std::vector<DenseMat> annihilators_;
  DenseMat parity_;
  DenseMat rho_eq_;
};

// Reduced state from the truncated Dyson series, order 0, 1 or 2.
DenseMat dyson_reduced(const CompositeModel& model, int order, double t);

}  // namespace fheom
