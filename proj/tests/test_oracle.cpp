#include "doctest.h"
#include "support.hpp"

#include <cmath>

#include "fheom/oracle.hpp"

using namespace fheom;
using fheom::testing::linspace;
using fheom::testing::max_abs;

namespace {

const std::vector<BathMode> kTwoModes{{0.3, 0.7}, {0.5, -0.4}};

DenseMat anticommutator(const DenseMat& a, const DenseMat& b) { return a * b + b * a; }

}  // namespace

TEST_CASE("global operators anticommute across system and environment") {
  const FockSpace sys(2);
  const std::vector<double> e{0.2, 0.5};
  const CompositeModel model(kTwoModes, quadratic_hamiltonian(sys, e), annihilation_op(sys, 1),
                             InverseTemperature::finite(1.0), 0.0, occupation_state(sys, std::vector<int>{0, 1}).matrix);
  CHECK(model.global_space().dim() == 16);
  const DenseMat s = model.embed_system(model.coupling()).dense();
  const DenseMat sd = s.adjoint();
  for (int k = 0; k < 2; ++k) {
    const DenseMat ck = model.env_annihilation(k).dense();
    CHECK(max_abs(anticommutator(s, ck)) == 0.0);
    CHECK(max_abs(anticommutator(s, ck.adjoint())) == 0.0);
    CHECK(max_abs(anticommutator(sd, ck)) == 0.0);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const DenseMat ci = model.embed_system(annihilation_op(sys, i)).dense();
      const DenseMat cj = model.embed_system(annihilation_op(sys, j)).dense();
      const DenseMat expected = DenseMat::Identity(16, 16) * double(i == j);
      CHECK(max_abs(anticommutator(ci, cj.adjoint()) - expected) == 0.0);
    }
  const DenseMat hi = model.interaction().dense();
  CHECK(max_abs(hi - hi.adjoint()) < 1e-14);
  CHECK(parity_violation(model.hamiltonian(), Parity::even) == 0.0);
}

TEST_CASE("composite model validation") {
  const fheom::testing::SingleMode m(1.0);
  const auto beta = InverseTemperature::finite(1.0);
  CHECK_THROWS_AS(CompositeModel(kTwoModes, m.c, m.c, beta, 0.0, m.projector(0)), Error);
  CHECK_THROWS_AS(CompositeModel(kTwoModes, m.h, m.h, beta, 0.0, m.projector(0)), Error);
  CHECK_THROWS_AS(CompositeModel(kTwoModes, m.h, m.c, beta, 0.0, DenseMat::Zero(4, 4)), Error);
  const std::vector<BathMode> many(12, BathMode{0.1, 0.0});
  CHECK_THROWS_AS(CompositeModel(many, m.h, m.c, beta, 0.0, m.projector(0)), Error);
}

TEST_CASE("exact evolution is unitary and reduces the initial product state exactly") {
  const fheom::testing::SingleMode m(0.8);
  std::mt19937 rng(41);
  const DenseMat rho_s = fheom::testing::random_density(2, rng);
  const CompositeModel model(kTwoModes, m.h, m.c, InverseTemperature::finite(1.5), 0.1, rho_s);
  const ExactEvolution ex(model);
  CHECK(max_abs(ex.state(0.0) - model.initial_state()) < 1e-14);
  CHECK(max_abs(reduce_parity_aware(model, model.initial_state()) - rho_s) < 1e-15);
  const Eigen::SelfAdjointEigenSolver<DenseMat> e0(model.initial_state());
  const DenseMat h = model.hamiltonian().dense();
  const cplx energy0 = (h * model.initial_state()).trace();
  for (double t : {0.7, 3.0}) {
    const DenseMat rho = ex.state(t);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-13);
    const Eigen::SelfAdjointEigenSolver<DenseMat> et(0.5 * (rho + rho.adjoint()));
    CHECK((et.eigenvalues() - e0.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs((h * rho).trace() - energy0) < 1e-12);
    CHECK(max_abs(rho - evolve_exact(model, t)) < 1e-13);
    const DenseMat u = ex.propagator(t);
    CHECK(max_abs(u * u.adjoint() - DenseMat::Identity(8, 8)) < 1e-13);
  }
}

TEST_CASE("zero coupling leaves the system on its bare trajectory") {
  const double w = 1.3;
  const fheom::testing::SingleMode m(w);
  DenseMat rho_s(2, 2);
  rho_s << 0.5, 0.5, 0.5, 0.5;
  const CompositeModel model({{0.0, 0.4}, {0.0, 1.0}}, m.h, m.c, InverseTemperature::finite(1.0), 0.0, rho_s);
  const ExactEvolution ex(model);
  for (double t : linspace(0.0, 5.0, 6)) {
    const DenseMat r = reduce_parity_aware(model, ex.state(t));
    CHECK(std::abs(r(1, 0) - 0.5 * std::exp(-I * w * t)) < 1e-13);
  }
}

TEST_CASE("plain partial trace loses an odd operator that the parity-aware reduction keeps") {
  const FockSpace sys(1);
  const DenseMat ddag = creation_op(sys, 0).dense();
  // d^dagger embedded next to one environment mode in the maximally mixed state.
  const CompositeModel model({{0.0, 0.0}}, 0.0 * number_op(sys, 0), annihilation_op(sys, 0),
                             InverseTemperature::finite(1.0), 0.0, DenseMat::Identity(2, 2) / 2.0);
  const DenseMat rho_full = 0.5 * model.embed_system(ddag);
  CHECK(max_abs(plain_partial_trace(1, 1, rho_full)) == 0.0);
  CHECK(max_abs(reduce_parity_aware(1, 1, rho_full) - ddag) == 0.0);
}

TEST_CASE("parity-aware reduction reproduces every system expectation value") {
  const FockSpace sys(2);
  const std::vector<double> e{0.4, -0.3};
  const std::vector<Hopping> hop{{0, 1, 0.2}};
  std::mt19937 rng(42);
  const DenseMat rho_s = fheom::testing::random_density(4, rng);
  const CompositeModel model(kTwoModes, quadratic_hamiltonian(sys, e, hop), annihilation_op(sys, 0),
                             InverseTemperature::finite(0.9), 0.2, rho_s);
  const DenseMat rho = evolve_exact(model, 2.3);
  const DenseMat reduced = reduce_parity_aware(model, rho);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMat a = fheom::testing::random_matrix(4, rng);
    worst = std::max(worst, std::abs((a * reduced).trace() - (model.embed_system(a) * rho).trace()));
  }
  CHECK(worst < 1e-12);
  // The even part of a globally even state is what the plain trace sees.
  CHECK(max_abs(parity_project(reduced, Parity::even) -
                parity_project(plain_partial_trace(2, 2, rho), Parity::even)) < 1e-14);
}

TEST_CASE("bath super-correlations") {
  const auto beta = InverseTemperature::finite(2.0);
  const BathCorrelator bc(kTwoModes, beta, 0.2);
  const BathSpec bath{DiscreteModes{kTwoModes}, beta, 0.2};

  SUBCASE("odd order vanishes") {
    CHECK(bc.super_correlation({{true, Action::left, 1.0}}) == cplx{});
    CHECK(bc.super_correlation({{true, Action::left, 1.0}, {false, Action::right, 0.5}, {true, Action::left, 0.1}}) ==
          cplx{});
    CHECK_THROWS_AS(bc.wick_pairing_sum({{true, Action::left, 1.0}}), Error);
  }

  SUBCASE("two-point function is the bath correlation") {
    const double t2 = 1.2, t1 = 0.3;
    const cplx direct = bc.super_correlation({{true, Action::left, t2}, {false, Action::left, t1}});
    CHECK(std::abs(direct - correlation_exact(bath, Sigma::plus, t2, t1)) < 1e-14);
    const cplx minus = bc.super_correlation({{false, Action::left, t2}, {true, Action::left, t1}});
    CHECK(std::abs(minus - correlation_exact(bath, Sigma::minus, t2, t1)) < 1e-14);
  }

  SUBCASE("wick theorem at fourth order for all actions and daggers") {
    const double times[4] = {1.3, 0.9, 0.4, 0.1};
    double worst = 0.0;
    for (int lam = 0; lam < 16; ++lam)
      for (int q = 0; q < 16; ++q) {
        SuperCorrelationQuery query;
        for (int i = 0; i < 4; ++i)
          query.push_back({bool((lam >> i) & 1), ((q >> i) & 1) ? Action::left : Action::right, times[i]});
        worst = std::max(worst, std::abs(bc.super_correlation(query) - bc.wick_pairing_sum(query)));
        // Time-ordering must absorb any listing order.
        std::swap(query[0], query[2]);
        worst = std::max(worst, std::abs(bc.super_correlation(query) - bc.wick_pairing_sum(query)));
      }
    CHECK(worst < 1e-10);
  }

  SUBCASE("sixth order on a single mode") {
    const BathCorrelator one({{0.6, 0.3}}, beta, 0.0);
    const double times[6] = {2.0, 1.5, 1.1, 0.8, 0.4, 0.2};
    double worst = 0.0;
    int nonzero = 0;
    for (int lam = 0; lam < 64; ++lam) {
      if (std::popcount(unsigned(lam)) != 3) continue;
      for (int q = 0; q < 64; q += 7) {
        SuperCorrelationQuery query;
        for (int i = 0; i < 6; ++i)
          query.push_back({bool((lam >> i) & 1), ((q >> i) & 1) ? Action::left : Action::right, times[i]});
        const cplx direct = one.super_correlation(query);
        if (std::abs(direct) > 1e-12) ++nonzero;
        worst = std::max(worst, std::abs(direct - one.wick_pairing_sum(query)));
      }
    }
    CHECK(worst < 1e-10);
    CHECK(nonzero > 0);
  }

  CHECK_THROWS_AS(BathCorrelator(std::vector<BathMode>(5, BathMode{0.1, 0.0}), beta, 0.0), Error);
}

TEST_CASE("second-order Dyson series approaches the exact reduced state") {
  const fheom::testing::SingleMode m(1.0);
  const CompositeModel model({{0.05, 0.6}}, m.h, m.c, InverseTemperature::finite(2.0), 0.0, m.projector(1));
  for (double t : {0.5, 1.0}) {
    const DenseMat exact = reduce_parity_aware(model, evolve_exact(model, t));
    const double e0 = max_abs(dyson_reduced(model, 0, t) - exact);
    const double e2 = max_abs(dyson_reduced(model, 2, t) - exact);
    CHECK(max_abs(dyson_reduced(model, 1, t) - dyson_reduced(model, 0, t)) == 0.0);
    CHECK(e2 < 1e-5);
    CHECK(e2 < 0.05 * e0);
  }
  CHECK_THROWS_AS(dyson_reduced(model, 3, 1.0), Error);
}
