#include "fheom/heom.hpp"

#include <algorithm>
#include <string>

namespace fheom {

namespace {

using Triplet = Eigen::Triplet<cplx>;

void add_block(std::vector<Triplet>& out, const SparseMat& block, Eigen::Index row0,
               Eigen::Index col0, cplx factor) {
  for (Eigen::Index k = 0; k < block.outerSize(); ++k)
    for (SparseMat::InnerIterator it(block, k); it; ++it)
      out.emplace_back(row0 + it.row(), col0 + it.col(), factor * it.value());
}

void enumerate(std::size_t k, std::size_t depth, std::vector<AdoLabel>& out) {
  for (std::size_t n = 0; n <= depth; ++n) {
    std::vector<bool> pick(k, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
    do {
      AdoLabel label;
      for (std::size_t j = 0; j < k; ++j)
        if (pick[j]) label.push_back(static_cast<std::uint32_t>(j));
      out.push_back(std::move(label));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
}

Parity level_parity(std::size_t n) { return n % 2 == 0 ? Parity::even : Parity::odd; }

// Number of label entries above j; its parity is the reordering sign.
std::size_t count_above(const AdoLabel& label, std::uint32_t j) {
  return static_cast<std::size_t>(std::count_if(label.begin(), label.end(), [j](auto l) { return l > j; }));
}

}  // namespace

Hierarchy::Hierarchy(CorrelationDecomposition decomposition, FockOperator s, FockOperator h_sys,
                     HierarchyOptions options)
    : decomposition_(std::move(decomposition)),
      s_(std::move(s)),
      h_(std::move(h_sys)),
      options_(options) {
  const std::size_t k = decomposition_.exponents.size();
  if (options_.depth > k)
    fail(ErrorCode::invalid_argument, "hierarchy depth " + std::to_string(options_.depth) +
                                          " exceeds the exponent count " + std::to_string(k));
  if (options_.alpha == cplx{}) fail(ErrorCode::invalid_argument, "alpha must be nonzero");
  if (!(s_.space == h_.space))
    fail(ErrorCode::invalid_argument, "coupling operator and Hamiltonian act on different spaces");
  if (parity_violation(s_, Parity::odd) > 1e-12)
    fail(ErrorCode::invalid_argument, "system coupling operator must have odd parity");
  if (parity_violation(h_, Parity::even) > 1e-12)
    fail(ErrorCode::invalid_argument, "system Hamiltonian must have even parity");
  for (std::size_t j = 0; j < k; ++j)
    if (!decomposition_.partner(j))
      fail(ErrorCode::invalid_argument, "exponent " + std::to_string(j) + " has no partner");
  build();
}

void Hierarchy::build() {
  const std::size_t k = decomposition_.exponents.size();
  labels_.clear();
  index_.clear();
  enumerate(k, options_.depth, labels_);
  for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], i);

  const Eigen::Index bs = block_size();
  const cplx alpha = options_.alpha;
  const bool general = options_.mode == HierarchyMode::generalized;
  const SuperOperator free = liouvillian(h_);

  // Vertices, generalized and per argument parity for the even-standard form.
  std::vector<SparseMat> raise(k), lower(k), raise_even[2], lower_even[2];
  for (auto p : {0, 1}) {
    raise_even[p].resize(k);
    lower_even[p].resize(k);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const Sigma sigma = decomposition_.exponents[j].sigma;
    if (general) {
      raise[j] = make_A(sigma, s_).matrix;
      lower[j] = make_B_script(j, s_, decomposition_).matrix;
    } else {
      for (Parity p : {Parity::even, Parity::odd}) {
        const int pi = p == Parity::even ? 0 : 1;
        raise_even[pi][j] = even_standard_raising(sigma, s_, p).matrix;
        lower_even[pi][j] = (-1.0 * even_standard_lowering(j, s_, decomposition_, p)).matrix;
      }
    }
  }

  std::vector<Triplet> trip;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const AdoLabel& label = labels_[i];
    const std::size_t n = label.size();
    const Eigen::Index row0 = static_cast<Eigen::Index>(i) * bs;

    cplx damping{};
    for (auto j : label) damping += decomposition_.exponents[j].b;
    add_block(trip, free.matrix, row0, row0, 1.0);
    for (Eigen::Index d = 0; d < bs; ++d) trip.emplace_back(row0 + d, row0 + d, -damping);

    if (n < options_.depth) {
      for (std::uint32_t j = 0; j < k; ++j) {
        if (std::binary_search(label.begin(), label.end(), j)) continue;
        AdoLabel up = label;
        up.insert(std::upper_bound(up.begin(), up.end(), j), j);
        const double sgn = count_above(label, j) % 2 == 0 ? 1.0 : -1.0;
        const Eigen::Index col0 = static_cast<Eigen::Index>(index_.at(up)) * bs;
        const SparseMat& v =
            general ? raise[j] : raise_even[level_parity(n + 1) == Parity::even ? 0 : 1][j];
        add_block(trip, v, row0, col0, sgn / alpha);
      }
    }
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::uint32_t j = label[pos];
      AdoLabel down = label;
      down.erase(down.begin() + static_cast<std::ptrdiff_t>(pos));
      const double sgn = (n - 1 - pos) % 2 == 0 ? 1.0 : -1.0;
      const Eigen::Index col0 = static_cast<Eigen::Index>(index_.at(down)) * bs;
      const SparseMat& v =
          general ? lower[j] : lower_even[level_parity(n - 1) == Parity::even ? 0 : 1][j];
      add_block(trip, v, row0, col0, sgn * alpha);
    }
  }
  const Eigen::Index size = state_size();
  generator_ = SparseRowMat(size, size);
  generator_.setFromTriplets(trip.begin(), trip.end());
  generator_.makeCompressed();
}

std::optional<std::size_t> Hierarchy::index_of(const AdoLabel& label) const {
  if (auto it = index_.find(label); it != index_.end()) return it->second;
  return std::nullopt;
}

Vec Hierarchy::rhs(const Vec& state, double) const {
  if (state.size() != state_size())
    fail(ErrorCode::invalid_argument, "hierarchy state has size " + std::to_string(state.size()) +
                                          ", expected " + std::to_string(state_size()));
  return generator_ * state;
}

Vec Hierarchy::initial_state(const DenseMat& rho0) const {
  if (rho0.rows() != system_dim() || rho0.cols() != system_dim())
    fail(ErrorCode::invalid_argument, "initial state does not match the system space");
  Vec state = Vec::Zero(state_size());
  state.head(block_size()) = vec(rho0);
  return state;
}

DenseMat Hierarchy::block(const Vec& state, std::size_t ado) const {
  if (state.size() != state_size() || ado >= ado_count())
    fail(ErrorCode::invalid_argument, "ADO block request out of range");
  return unvec(state.segment(static_cast<Eigen::Index>(ado) * block_size(), block_size()),
               system_dim());
}

Hierarchy Hierarchy::rescaled(cplx alpha_new) const {
  if (alpha_new == cplx{}) fail(ErrorCode::invalid_argument, "alpha must be nonzero");
  HierarchyOptions opts = options_;
  opts.alpha = alpha_new;
  return Hierarchy(decomposition_, s_, h_, opts);
}

Hierarchy build_hierarchy(CorrelationDecomposition decomposition, FockOperator s,
                          FockOperator h_sys, HierarchyOptions options) {
  return Hierarchy(std::move(decomposition), std::move(s), std::move(h_sys), options);
}

std::vector<Vec> evolve_heom_states(const Hierarchy& h, const DenseMat& rho0,
                                    std::span<const double> t_grid, const IntegratorOptions& opts,
                                    IntegratorStats* stats) {
  if (h.options().mode == HierarchyMode::even_standard &&
      parity_violation(rho0, Parity::even) > 1e-12)
    fail(ErrorCode::unsupported_sector,
         "the even-standard hierarchy only evolves even-parity inputs; this input has an odd "
         "component, use the generalized hierarchy");
  const auto& g = h.generator();
  Rhs f = [&g](double, const Vec& y, Vec& dy) { dy.noalias() = g * y; };
  return integrate(f, h.initial_state(rho0), t_grid, opts, stats);
}

HeomTrajectory evolve_heom(const Hierarchy& h, const DenseMat& rho0, std::span<const double> t_grid,
                           const IntegratorOptions& opts) {
  HeomTrajectory out;
  const auto states = evolve_heom_states(h, rho0, t_grid, opts, &out.stats);
  out.times.assign(t_grid.begin(), t_grid.end());
  out.rho.reserve(states.size());
  for (const auto& s : states) out.rho.push_back(h.block(s, 0));
  return out;
}

}  // namespace fheom
