// heom.hpp - fermionic hierarchy of auxiliary density operators
//
// Labels are sets of distinct exponent indices stored ascending. The canonical ordered string
// j_n ... j_1 writes them descending, so j_k is the k-th smallest index.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fheom/bath.hpp"
#include "fheom/fock.hpp"
#include "fheom/ode.hpp"
#include "fheom/superop.hpp"

namespace fheom {

using AdoLabel = std::vector<std::uint32_t>;

enum class HierarchyMode {
  generalized,    // valid for either parity of rho_S(0)
  even_standard,  // fixed-parity vertices, refuses inputs with an odd component
};

struct HierarchyOptions {
  std::size_t depth = 4;
  HierarchyMode mode = HierarchyMode::generalized;
  cplx alpha = I;
};

class Hierarchy {
 public:
  Hierarchy(CorrelationDecomposition decomposition, FockOperator s, FockOperator h_sys,
            HierarchyOptions options = {});

  std::size_t exponent_count() const { return decomposition_.exponents.size(); }
  std::size_t ado_count() const { return labels_.size(); }
  Eigen::Index system_dim() const { return s_.space.dim(); }
  Eigen::Index state_size() const { return static_cast<Eigen::Index>(ado_count()) * block_size(); }
  Eigen::Index block_size() const { return system_dim() * system_dim(); }
  const HierarchyOptions& options() const { return options_; }
  const CorrelationDecomposition& decomposition() const { return decomposition_; }
  const FockOperator& coupling() const { return s_; }
  const FockOperator& hamiltonian() const { return h_; }

  const std::vector<AdoLabel>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(const AdoLabel& label) const;

  // Row-major generator G with d(state)/dt = G state.
  const SparseRowMat& generator() const { return generator_; }

  Vec rhs(const Vec& state, double t) const;

  // rho_S(0) in the empty-label block, zeros elsewhere.
  Vec initial_state(const DenseMat& rho0) const;
  DenseMat block(const Vec& state, std::size_t ado) const;

  // Same dynamics with ADOs scaled by (alpha_new / alpha)^n.
  Hierarchy rescaled(cplx alpha_new) const;

 private:
  void build();

  CorrelationDecomposition decomposition_;
  FockOperator s_;
  FockOperator h_;
  HierarchyOptions options_;
  std::vector<AdoLabel> labels_;
  std::map<AdoLabel, std::size_t> index_;
  SparseRowMat generator_;
};

Hierarchy build_hierarchy(CorrelationDecomposition decomposition, FockOperator s,
                          FockOperator h_sys, HierarchyOptions options = {});

struct HeomTrajectory {
  std::vector<double> times;
  std::vector<DenseMat> rho;  // physical block rho^(0)
  IntegratorStats stats;
};

// Throws Error(unsupported_sector) when an even_standard hierarchy receives odd content.
HeomTrajectory evolve_heom(const Hierarchy& h, const DenseMat& rho0, std::span<const double> t_grid,
                           const IntegratorOptions& opts = {});

// Full flattened hierarchy state at each grid time.
std::vector<Vec> evolve_heom_states(const Hierarchy& h, const DenseMat& rho0,
                                    std::span<const double> t_grid, const IntegratorOptions& opts = {},
                                    IntegratorStats* stats = nullptr);

}  // namespace fheom
