#include "doctest.h"
#include "support.hpp"

#include "fheom/superop.hpp"

using namespace fheom;
using fheom::testing::max_abs;
using fheom::testing::random_matrix;

TEST_CASE("vec and unvec use column stacking") {
  DenseMat m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const Vec v = vec(m);
  CHECK(v(1) == cplx{3.0, 0.0});
  CHECK(v(2) == cplx{2.0, 0.0});
  CHECK(unvec(v, 2) == m);
}

TEST_CASE("left and right multiplication match the matrix products") {
  std::mt19937 rng(3);
  const FockSpace space(2);
  const FockOperator a = annihilation_op(space, 1) + cplx{0.3, 0.2} * creation_op(space, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMat x = random_matrix(space.dim(), rng);
    CHECK(max_abs(left_mul(a).apply(x) - a.dense() * x) < 1e-14);
    CHECK(max_abs(right_mul(a).apply(x) - x * a.dense()) < 1e-14);
    CHECK(max_abs(identity_super(space.dim()).apply(x) - x) == 0.0);
  }
}

TEST_CASE("composition is associative and matches nested application") {
  std::mt19937 rng(4);
  const FockSpace space(2);
  const auto s1 = left_mul(annihilation_op(space, 0));
  const auto s2 = right_mul(creation_op(space, 1));
  const auto s3 = parity_super(space);
  const DenseMat x = random_matrix(space.dim(), rng);
  CHECK(max_abs(((s1 * s2) * s3).matrix - (s1 * (s2 * s3)).matrix) < 1e-15);
  CHECK(max_abs((s1 * s2).apply(x) - s1.apply(s2.apply(x))) < 1e-14);
  CHECK(max_abs((s1 + s2).apply(x) - s1.apply(x) - s2.apply(x)) < 1e-14);
  CHECK(max_abs((cplx{2.0, -1.0} * s1).apply(x) - cplx{2.0, -1.0} * s1.apply(x)) < 1e-14);
}

TEST_CASE("kron follows the Eigen index convention") {
  SparseMat a(2, 2), b(2, 2);
  a.insert(0, 1) = 2.0;
  b.insert(1, 0) = 3.0;
  const DenseMat k = DenseMat(kron(a, b));
  CHECK(k(1, 2) == cplx{6.0, 0.0});
  CHECK(max_abs(k) == 6.0);
}

TEST_CASE("liouvillian is minus i times the commutator") {
  std::mt19937 rng(5);
  const FockSpace space(2);
  const std::vector<double> e{0.4, -1.1};
  const std::vector<Hopping> hop{{0, 1, 0.3}};
  const FockOperator h = quadratic_hamiltonian(space, e, hop);
  const DenseMat x = random_matrix(space.dim(), rng);
  const DenseMat hd = h.dense();
  CHECK(max_abs(liouvillian(h).apply(x) - (-I) * (hd * x - x * hd)) < 1e-14);
}

TEST_CASE("sector projectors are complementary idempotents") {
  std::mt19937 rng(6);
  const FockSpace space(2);
  const auto pe = sector_projector(space, Parity::even);
  const auto po = sector_projector(space, Parity::odd);
  const DenseMat x = random_matrix(space.dim(), rng);
  CHECK(max_abs(pe.apply(x) + po.apply(x) - x) < 1e-15);
  CHECK(max_abs((pe * pe).matrix - pe.matrix) == 0.0);
  CHECK(max_abs((pe * po).matrix) == 0.0);
  CHECK(max_abs(pe.apply(x) - parity_project(x, Parity::even)) == 0.0);
  const DenseMat p = parity_op(space).dense();
  CHECK(max_abs(parity_super(space).apply(x) - p * x * p) < 1e-15);
}

TEST_CASE("bath vertices act as written") {
  std::mt19937 rng(7);
  const FockSpace space(2);
  const FockOperator s = annihilation_op(space, 0) + 0.5 * annihilation_op(space, 1);
  const DenseMat p = parity_op(space).dense();
  const DenseMat x = random_matrix(space.dim(), rng);
  const DenseMat sd = s.dense();
  const DenseMat sdag = s.adjoint().dense();

  CHECK(max_abs(branch_op(s, Sigma::plus).dense() - sdag) == 0.0);
  CHECK(max_abs(branch_op(s, Sigma::minus).dense() - sd) == 0.0);
  CHECK(max_abs(make_A(Sigma::plus, s).apply(x) - (sd * x - p * x * sd * p)) < 1e-14);
  CHECK(max_abs(make_A(Sigma::minus, s).apply(x) - (sdag * x - p * x * sdag * p)) < 1e-14);

  const BathSpec bath{DiscreteModes{{{0.3, 0.8}}}, InverseTemperature::finite(1.5), 0.0};
  const auto d = decompose_discrete(bath);
  for (std::size_t j = 0; j < d.exponents.size(); ++j) {
    const auto& e = d.exponents[j];
    const cplx ap = std::conj(d.exponents[*d.partner(j)].a);
    const DenseMat ss = branch_op(s, e.sigma).dense();
    CHECK(max_abs(make_B_script(j, s, d).apply(x) - (-(e.a * ss * x + ap * p * x * ss * p))) < 1e-14);
  }
}

TEST_CASE("fixed-parity vertices agree with the general ones on their sector") {
  std::mt19937 rng(8);
  const FockSpace space(2);
  const FockOperator s = annihilation_op(space, 1);
  const BathSpec bath{DiscreteModes{{{0.3, 0.8}, {0.2, -0.4}}}, InverseTemperature::finite(1.5), 0.1};
  const auto d = decompose_discrete(bath);
  for (Parity par : {Parity::even, Parity::odd}) {
    const DenseMat x = parity_project(random_matrix(space.dim(), rng), par);
    for (Sigma sg : {Sigma::plus, Sigma::minus}) {
      const DenseMat general = make_A(sg, s).apply(x);
      const DenseMat fixed = even_standard_raising(sg, s, par).apply(x);
      CHECK(max_abs(general - fixed) < 1e-14);
    }
    for (std::size_t j = 0; j < d.exponents.size(); ++j) {
      const DenseMat general = make_B_script(j, s, d).apply(x);
      const DenseMat fixed = even_standard_lowering(j, s, d, par).apply(x);
      CHECK(max_abs(general + fixed) < 1e-14);
    }
  }
}

TEST_CASE("influence kernel: commutator form equals the vertex composition on each sector") {
  std::mt19937 rng(9);
  const FockSpace space(2);
  const FockOperator s = annihilation_op(space, 0);
  const std::vector<double> e{0.7, -0.2};
  const std::vector<Hopping> hop{{0, 1, 0.25}};
  const FockOperator h = quadratic_hamiltonian(space, e, hop);
  const BathSpec bath{DiscreteModes{{{0.3, 0.8}, {0.2, -0.4}}}, InverseTemperature::finite(1.5), 0.1};
  const auto d = decompose_discrete(bath);
  const CorrelationFn corr = [&](Sigma sg, double t2, double t1) { return d.evaluate(sg, t2 - t1); };
  for (Parity par : {Parity::even, Parity::odd}) {
    const DenseMat x = parity_project(random_matrix(space.dim(), rng), par);
    for (auto [t2, t1] : {std::pair{0.9, 0.2}, std::pair{2.5, 1.7}}) {
      const DenseMat kernel = make_W_kernel(par, corr, s, h, t2, t1).apply(x);
      const DenseMat composed = make_W_composed(corr, s, h, t2, t1).apply(x);
      CHECK(max_abs(kernel - composed) < 1e-13);
      CHECK(max_abs(kernel) > 1e-3);
    }
  }
}
