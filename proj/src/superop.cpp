#include "fheom/superop.hpp"

#include <string>
#include <vector>

namespace fheom {

namespace {

using Triplet = Eigen::Triplet<cplx>;

void require_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b)
    fail(ErrorCode::invalid_argument,
         "superoperator dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

void require_odd(const FockOperator& s) {
  if (parity_violation(s, Parity::odd) > 1e-12)
    fail(ErrorCode::invalid_argument, "system coupling operator must have odd parity");
}

SparseMat sparse(const DenseMat& m) { return m.sparseView(0.0, 0.0); }

SparseMat identity_sparse(Eigen::Index d) {
  SparseMat id(d, d);
  id.setIdentity();
  return id;
}

// Interaction picture U^dagger(t) X U(t) with U = exp(-i H t).
DenseMat heisenberg(const DenseMat& x, const Eigen::SelfAdjointEigenSolver<DenseMat>& eig, double t) {
  const Eigen::VectorXcd phase = (I * eig.eigenvalues().cast<cplx>() * t).array().exp();
  const DenseMat& v = eig.eigenvectors();
  return v * phase.asDiagonal() * (v.adjoint() * x * v) * phase.conjugate().asDiagonal() * v.adjoint();
}

struct PictureOps {
  DenseMat s_dag_t1, s_t1, s_dag_t2, s_t2;
};

PictureOps interaction_ops(const FockOperator& s, const FockOperator& h, double t2, double t1) {
  require_odd(s);
  if (!(s.space == h.space)) fail(ErrorCode::invalid_argument, "s and H_S act on different spaces");
  if (parity_violation(h, Parity::even) > 1e-12)
    fail(ErrorCode::invalid_argument, "system Hamiltonian must have even parity");
  const Eigen::SelfAdjointEigenSolver<DenseMat> eig(h.dense());
  const DenseMat sd = s.dense();
  const DenseMat sdag = sd.adjoint();
  return {heisenberg(sdag, eig, t1), heisenberg(sd, eig, t1), heisenberg(sdag, eig, t2),
          heisenberg(sd, eig, t2)};
}

}  // namespace

SuperOperator::SuperOperator(Eigen::Index d, SparseMat m) : dim(d), matrix(std::move(m)) {
  if (matrix.rows() != d * d || matrix.cols() != d * d)
    fail(ErrorCode::invalid_argument, "superoperator matrix must be d^2 x d^2");
  matrix.makeCompressed();
}

DenseMat SuperOperator::apply(const DenseMat& rho) const {
  require_dim(rho.rows(), dim);
  require_dim(rho.cols(), dim);
  return unvec(matrix * vec(rho), dim);
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& o) {
  require_dim(dim, o.dim);
  matrix += o.matrix;
  return *this;
}

SuperOperator& SuperOperator::operator-=(const SuperOperator& o) {
  require_dim(dim, o.dim);
  matrix -= o.matrix;
  return *this;
}

SuperOperator& SuperOperator::operator*=(cplx z) {
  matrix *= z;
  return *this;
}

SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
SuperOperator operator-(SuperOperator a, const SuperOperator& b) { return a -= b; }
SuperOperator operator*(cplx z, SuperOperator a) { return a *= z; }

SuperOperator operator*(const SuperOperator& a, const SuperOperator& b) {
  require_dim(a.dim, b.dim);
  return {a.dim, SparseMat(a.matrix * b.matrix)};
}

Vec vec(const DenseMat& rho) { return Eigen::Map<const Vec>(rho.data(), rho.size()); }

DenseMat unvec(const Vec& v, Eigen::Index dim) {
  require_dim(v.size(), dim * dim);
  return Eigen::Map<const DenseMat>(v.data(), dim, dim);
}

SparseMat kron(const SparseMat& a, const SparseMat& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMat::InnerIterator ia(a, ka); ia; ++ia)
      for (Eigen::Index kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMat::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
  SparseMat out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SuperOperator identity_super(Eigen::Index dim) { return {dim, identity_sparse(dim * dim)}; }

SuperOperator left_mul(const SparseMat& a) {
  require_dim(a.rows(), a.cols());
  return {a.rows(), kron(identity_sparse(a.rows()), a)};
}

SuperOperator right_mul(const SparseMat& a) {
  require_dim(a.rows(), a.cols());
  return {a.rows(), kron(SparseMat(a.transpose()), identity_sparse(a.rows()))};
}

SuperOperator left_mul(const FockOperator& a) { return left_mul(a.matrix); }
SuperOperator right_mul(const FockOperator& a) { return right_mul(a.matrix); }

SuperOperator parity_super(const FockSpace& space) {
  const Eigen::Index d = space.dim();
  std::vector<Triplet> t;
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r)
      t.emplace_back(r + c * d, r + c * d, parity_of(r) == parity_of(c) ? 1.0 : -1.0);
  SparseMat m(d * d, d * d);
  m.setFromTriplets(t.begin(), t.end());
  return {d, std::move(m)};
}

SuperOperator sector_projector(const FockSpace& space, Parity sector) {
  const Eigen::Index d = space.dim();
  std::vector<Triplet> t;
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r)
      if ((parity_of(r) == parity_of(c)) == (sector == Parity::even))
        t.emplace_back(r + c * d, r + c * d, 1.0);
  SparseMat m(d * d, d * d);
  m.setFromTriplets(t.begin(), t.end());
  return {d, std::move(m)};
}

SuperOperator liouvillian(const FockOperator& h) {
  return -I * (left_mul(h) - right_mul(h));
}

FockOperator branch_op(const FockOperator& s, Sigma sigma) {
  return sigma == Sigma::plus ? s.adjoint() : s;
}

SuperOperator make_A(Sigma sigma, const FockOperator& s) {
  require_odd(s);
  const FockOperator op = branch_op(s, flip(sigma));
  return left_mul(op) - parity_super(s.space) * right_mul(op);
}

SuperOperator make_B_script(std::size_t j, const FockOperator& s,
                            const CorrelationDecomposition& exps) {
  require_odd(s);
  if (j >= exps.exponents.size())
    fail(ErrorCode::invalid_argument, "exponent index " + std::to_string(j) + " out of range");
  const auto p = exps.partner(j);
  if (!p) fail(ErrorCode::invalid_argument, "exponent " + std::to_string(j) + " has no partner");
  const auto& e = exps.exponents[j];
  const FockOperator op = branch_op(s, e.sigma);
  return -1.0 * (e.a * left_mul(op) +
                 std::conj(exps.exponents[*p].a) * (parity_super(s.space) * right_mul(op)));
}

SuperOperator even_standard_raising(Sigma sigma, const FockOperator& s, Parity argument) {
  require_odd(s);
  const FockOperator op = branch_op(s, flip(sigma));
  const double p = argument == Parity::even ? 1.0 : -1.0;
  return left_mul(op) + p * right_mul(op);
}

SuperOperator even_standard_lowering(std::size_t j, const FockOperator& s,
                                     const CorrelationDecomposition& exps, Parity argument) {
  require_odd(s);
  const auto p = exps.partner(j);
  if (!p) fail(ErrorCode::invalid_argument, "exponent " + std::to_string(j) + " has no partner");
  const auto& e = exps.exponents.at(j);
  const FockOperator op = branch_op(s, e.sigma);
  const double sgn = argument == Parity::even ? 1.0 : -1.0;
  return e.a * left_mul(op) - sgn * std::conj(exps.exponents[*p].a) * right_mul(op);
}

SuperOperator make_W_kernel(Parity sector, const CorrelationFn& corr, const FockOperator& s,
                            const FockOperator& h_sys, double t2, double t1) {
  const auto ops = interaction_ops(s, h_sys, t2, t1);
  // [X, Y .]_-/+ and [. Y, X]_-/+ as superoperators; minus on the even sector.
  const double pm = sector == Parity::even ? -1.0 : 1.0;
  auto bracket_left = [&](const DenseMat& x, const DenseMat& y) {
    return left_mul(sparse(x * y)) + pm * (right_mul(sparse(x)) * left_mul(sparse(y)));
  };
  auto bracket_right = [&](const DenseMat& y, const DenseMat& x) {
    return right_mul(sparse(y * x)) + pm * (left_mul(sparse(x)) * right_mul(sparse(y)));
  };
  const cplx c_plus = corr(Sigma::plus, t2, t1);
  const cplx c_minus = corr(Sigma::minus, t2, t1);
  SuperOperator w = -c_plus * bracket_left(ops.s_t2, ops.s_dag_t1);
  w -= std::conj(c_minus) * bracket_right(ops.s_dag_t1, ops.s_t2);
  w -= c_minus * bracket_left(ops.s_dag_t2, ops.s_t1);
  w -= std::conj(c_plus) * bracket_right(ops.s_t1, ops.s_dag_t2);
  return w * sector_projector(s.space, sector);
}

SuperOperator make_W_composed(const CorrelationFn& corr, const FockOperator& s,
                              const FockOperator& h_sys, double t2, double t1) {
  const auto ops = interaction_ops(s, h_sys, t2, t1);
  const SuperOperator parity = parity_super(s.space);
  const Eigen::Index d = s.space.dim();
  SuperOperator w{d, SparseMat(d * d, d * d)};
  for (Sigma sigma : {Sigma::plus, Sigma::minus}) {
    const DenseMat& raise = sigma == Sigma::plus ? ops.s_t2 : ops.s_dag_t2;
    const DenseMat& lower = sigma == Sigma::plus ? ops.s_dag_t1 : ops.s_t1;
    const SuperOperator a = left_mul(sparse(raise)) - parity * right_mul(sparse(raise));
    const SuperOperator b =
        -1.0 * (corr(sigma, t2, t1) * left_mul(sparse(lower)) +
                std::conj(corr(flip(sigma), t2, t1)) * (parity * right_mul(sparse(lower))));
    w += a * b;
  }
  return w;
}

}  // namespace fheom
