// superop.hpp - superoperators on column-stacked density matrices
//
// vec(rho)[i + j d] = rho(i, j), so vec(A rho B) = (B^T (x) A) vec(rho).
#pragma once

#include <functional>

#include "fheom/bath.hpp"
#include "fheom/fock.hpp"
#include "fheom/types.hpp"

namespace fheom {

struct SuperOperator {
  Eigen::Index dim;
  SparseMat matrix;

  SuperOperator(Eigen::Index d, SparseMat m);

  DenseMat apply(const DenseMat& rho) const;

  SuperOperator& operator+=(const SuperOperator& o);
  SuperOperator& operator-=(const SuperOperator& o);
  SuperOperator& operator*=(cplx z);
};

SuperOperator operator+(SuperOperator a, const SuperOperator& b);
SuperOperator operator-(SuperOperator a, const SuperOperator& b);
SuperOperator operator*(cplx z, SuperOperator a);
// Composition: (a * b)[rho] = a[b[rho]].
SuperOperator operator*(const SuperOperator& a, const SuperOperator& b);

Vec vec(const DenseMat& rho);
DenseMat unvec(const Vec& v, Eigen::Index dim);

SparseMat kron(const SparseMat& a, const SparseMat& b);

SuperOperator identity_super(Eigen::Index dim);
SuperOperator left_mul(const FockOperator& a);
SuperOperator right_mul(const FockOperator& a);
SuperOperator left_mul(const SparseMat& a);
SuperOperator right_mul(const SparseMat& a);
SuperOperator parity_super(const FockSpace& space);
// Keeps the even or odd operator sector.
SuperOperator sector_projector(const FockSpace& space, Parity sector);
SuperOperator liouvillian(const FockOperator& h);

// s^{+} = s^dagger, s^{-} = s.
FockOperator branch_op(const FockOperator& s, Sigma sigma);

// A^sigma[.] = s^{-sigma} . - P (. s^{-sigma}) P
SuperOperator make_A(Sigma sigma, const FockOperator& s);

// B_j[.] = -(a_j s^sigma . + conj(a_partner) P (. s^sigma) P) for exponent j = (term, sigma).
SuperOperator make_B_script(std::size_t j, const FockOperator& s, const CorrelationDecomposition& exps);

// Fixed-parity forms acting on an argument of known parity.
// Raising: s^{-sigma} . + (-1)^p . s^{-sigma}
SuperOperator even_standard_raising(Sigma sigma, const FockOperator& s, Parity argument);
// Lowering: a s^sigma . - (-1)^p conj(a_partner) . s^sigma
SuperOperator even_standard_lowering(std::size_t j, const FockOperator& s,
                                     const CorrelationDecomposition& exps, Parity argument);

// C(sigma, t2, t1) two-time bath correlation.
using CorrelationFn = std::function<cplx(Sigma, double, double)>;

// Second-order influence kernel restricted to one sector, from the four-term commutator form.
SuperOperator make_W_kernel(Parity sector, const CorrelationFn& corr, const FockOperator& s,
                            const FockOperator& h_sys, double t2, double t1);

// The same kernel assembled as sum_sigma A^sigma(t2) B^sigma(t2, t1), valid on both sectors.
SuperOperator make_W_composed(const CorrelationFn& corr, const FockOperator& s,
                              const FockOperator& h_sys, double t2, double t1);

}  // namespace fheom
