#include "fheom/fock.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace fheom {

namespace {

using Triplet = Eigen::Triplet<cplx>;

void require_same_space(const FockSpace& a, const FockSpace& b) {
  if (!(a == b))
    fail(ErrorCode::invalid_argument, "operators live on different Fock spaces (" +
                                          std::to_string(a.n_modes()) + " vs " +
                                          std::to_string(b.n_modes()) + " modes)");
}

void require_mode(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.n_modes())
    fail(ErrorCode::invalid_argument, "mode " + std::to_string(mode) + " out of range for " +
                                          std::to_string(space.n_modes()) + " modes");
}

SparseMat diagonal(const FockSpace& space, auto&& entry) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(space.dim()));
  for (Eigen::Index b = 0; b < space.dim(); ++b) {
    const cplx v = entry(b);
    if (v != cplx{}) t.emplace_back(b, b, v);
  }
  SparseMat m(space.dim(), space.dim());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

FockSpace::FockSpace(int n_modes) : n_modes_(n_modes) {
  if (n_modes < 1 || n_modes > 24)
    fail(ErrorCode::invalid_argument,
         "number of modes must be in [1, 24], got " + std::to_string(n_modes));
}

FockOperator::FockOperator(FockSpace sp, SparseMat m) : space(sp), matrix(std::move(m)) {
  if (matrix.rows() != space.dim() || matrix.cols() != space.dim())
    fail(ErrorCode::invalid_argument, "operator matrix does not match Fock space dimension");
  matrix.makeCompressed();
}

FockOperator FockOperator::adjoint() const { return {space, SparseMat(matrix.adjoint())}; }

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require_same_space(space, o.space);
  matrix += o.matrix;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  require_same_space(space, o.space);
  matrix -= o.matrix;
  return *this;
}

FockOperator& FockOperator::operator*=(cplx z) {
  matrix *= z;
  return *this;
}

FockOperator operator+(FockOperator a, const FockOperator& b) { return a += b; }
FockOperator operator-(FockOperator a, const FockOperator& b) { return a -= b; }
FockOperator operator*(cplx z, FockOperator a) { return a *= z; }

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_space(a.space, b.space);
  return {a.space, SparseMat(a.matrix * b.matrix)};
}

DensityMatrix::DensityMatrix(FockSpace sp, DenseMat m) : space(sp), matrix(std::move(m)) {
  if (matrix.rows() != space.dim() || matrix.cols() != space.dim())
    fail(ErrorCode::invalid_argument, "density matrix does not match Fock space dimension");
}

FockOperator identity_op(const FockSpace& space) {
  return {space, diagonal(space, [](Eigen::Index) { return cplx{1.0}; })};
}

FockOperator zero_op(const FockSpace& space) {
  return {space, SparseMat(space.dim(), space.dim())};
}

FockOperator annihilation_op(const FockSpace& space, int mode) {
  require_mode(space, mode);
  const Eigen::Index bit = Eigen::Index{1} << mode;
  const Eigen::Index lower = bit - 1;
  std::vector<Triplet> t;
  for (Eigen::Index b = 0; b < space.dim(); ++b) {
    if (!(b & bit)) continue;
    const int string = std::popcount(static_cast<unsigned long long>(b & lower));
    t.emplace_back(b ^ bit, b, string % 2 == 0 ? 1.0 : -1.0);
  }
  SparseMat m(space.dim(), space.dim());
  m.setFromTriplets(t.begin(), t.end());
  return {space, std::move(m)};
}

FockOperator creation_op(const FockSpace& space, int mode) {
  return annihilation_op(space, mode).adjoint();
}

FockOperator number_op(const FockSpace& space, int mode) {
  require_mode(space, mode);
  const Eigen::Index bit = Eigen::Index{1} << mode;
  return {space, diagonal(space, [bit](Eigen::Index b) { return cplx{(b & bit) ? 1.0 : 0.0}; })};
}

FockOperator parity_op(const FockSpace& space) {
  return {space, diagonal(space, [](Eigen::Index b) {
            return cplx{parity_of(b) == Parity::even ? 1.0 : -1.0};
          })};
}

FockOperator parity_project(const FockOperator& op, Parity sector) {
  std::vector<Triplet> t;
  for (Eigen::Index k = 0; k < op.matrix.outerSize(); ++k)
    for (SparseMat::InnerIterator it(op.matrix, k); it; ++it) {
      const bool same = parity_of(it.row()) == parity_of(it.col());
      if (same == (sector == Parity::even)) t.emplace_back(it.row(), it.col(), it.value());
    }
  SparseMat m(op.matrix.rows(), op.matrix.cols());
  m.setFromTriplets(t.begin(), t.end());
  return {op.space, std::move(m)};
}

DenseMat parity_project(const DenseMat& m, Parity sector) {
  DenseMat out = DenseMat::Zero(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const bool same = parity_of(r) == parity_of(c);
      if (same == (sector == Parity::even)) out(r, c) = m(r, c);
    }
  return out;
}

double parity_violation(const DenseMat& m, Parity expected) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const Parity other = expected == Parity::even ? Parity::odd : Parity::even;
  return parity_project(m, other).cwiseAbs().maxCoeff() / scale;
}

double parity_violation(const FockOperator& op, Parity expected) {
  return parity_violation(op.dense(), expected);
}

FockOperator quadratic_hamiltonian(const FockSpace& space, std::span<const double> energies,
                                   std::span<const Hopping> hoppings) {
  if (static_cast<int>(energies.size()) != space.n_modes())
    fail(ErrorCode::invalid_argument, "expected one energy per mode");
  FockOperator h = zero_op(space);
  for (int k = 0; k < space.n_modes(); ++k) h += energies[k] * number_op(space, k);
  for (const auto& hop : hoppings) {
    if (hop.from == hop.to)
      fail(ErrorCode::invalid_argument, "hopping must connect two different modes");
    const FockOperator term = creation_op(space, hop.to) * annihilation_op(space, hop.from);
    h += hop.amplitude * term;
    h += std::conj(hop.amplitude) * term.adjoint();
  }
  return h;
}

DensityMatrix thermal_state(const FockSpace& space, std::span<const double> energies,
                            const InverseTemperature& beta, double mu) {
  if (static_cast<int>(energies.size()) != space.n_modes())
    fail(ErrorCode::invalid_argument, "expected one energy per mode");
  std::vector<double> occ(energies.size());
  for (std::size_t k = 0; k < energies.size(); ++k) occ[k] = fermi_dirac(energies[k], beta, mu);
  DenseMat rho = DenseMat::Zero(space.dim(), space.dim());
  for (Eigen::Index b = 0; b < space.dim(); ++b) {
    double p = 1.0;
    for (int k = 0; k < space.n_modes(); ++k) p *= (b >> k) & 1 ? occ[k] : 1.0 - occ[k];
    rho(b, b) = p;
  }
  return {space, std::move(rho)};
}

DensityMatrix occupation_state(const FockSpace& space, std::span<const int> occupations) {
  if (static_cast<int>(occupations.size()) != space.n_modes())
    fail(ErrorCode::invalid_argument, "expected one occupation per mode");
  Eigen::Index b = 0;
  for (int k = 0; k < space.n_modes(); ++k) {
    if (occupations[k] != 0 && occupations[k] != 1)
      fail(ErrorCode::invalid_argument, "occupations must be 0 or 1");
    if (occupations[k]) b |= Eigen::Index{1} << k;
  }
  DenseMat rho = DenseMat::Zero(space.dim(), space.dim());
  rho(b, b) = 1.0;
  return {space, std::move(rho)};
}

}  // namespace fheom
