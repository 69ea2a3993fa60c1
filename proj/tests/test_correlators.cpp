#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <cstdlib>

#include "fheom/correlators.hpp"
#include "fheom/oracle.hpp"
#include "fheom/parallel.hpp"

using namespace fheom;
using fheom::testing::linspace;

namespace {

const std::vector<BathMode> kThreeModes{{0.05, 0.6}, {0.05, 1.0}, {0.05, 1.5}};

CorrelationResult synthetic(double w0, double gamma, double t_max, int n) {
  CorrelationResult c{linspace(0.0, t_max, n), {}, "synthetic"};
  for (double t : c.times) c.values.push_back(std::exp((-I * w0 - gamma) * t));
  return c;
}

}  // namespace

TEST_CASE("correlation starts at the equal-time expectation") {
  const FockSpace space(2);
  const std::vector<double> e{0.4, 0.9};
  const std::vector<Hopping> hop{{0, 1, 0.2}};
  const FockOperator h = quadratic_hamiltonian(space, e, hop);
  const auto d = decompose_discrete({DiscreteModes{kThreeModes}, InverseTemperature::finite(2.0), 0.0});
  const Hierarchy hier(d, annihilation_op(space, 0), h, {3});
  std::mt19937 rng(51);
  const DenseMat rho0 = parity_project(fheom::testing::random_density(4, rng), Parity::even);
  const auto a = annihilation_op(space, 1), b = creation_op(space, 0);
  const auto t = linspace(0.0, 2.0, 5);
  const auto c = system_correlation(a, b, hier, rho0, t);
  REQUIRE(c.values.size() == t.size());
  CHECK(c.solver == "heom");
  CHECK(std::abs(c.values[0] - (a.dense() * b.dense() * rho0).trace()) < 1e-14);
  CHECK_THROWS_AS(system_correlation(annihilation_op(FockSpace(1), 0), b, hier, rho0, t), Error);
}

TEST_CASE("odd-parity correlation from the generalized hierarchy matches the full-space oracle") {
  const fheom::testing::SingleMode m(1.0);
  const auto beta = InverseTemperature::finite(2.0);
  const DenseMat rho0 = m.projector(0);
  const CompositeModel model(kThreeModes, m.h, m.c, beta, 0.0, rho0);
  const ExactEvolution ex(model);
  const auto d = decompose_discrete({DiscreteModes{kThreeModes}, beta, 0.0});
  const auto t = linspace(0.0, 10.0, 51);
  const auto c = system_correlation(m.c, m.c.adjoint(), Hierarchy(d, m.c, m.h, {6}), rho0, t);
  const DenseMat a = model.embed_system(m.c).dense();
  const DenseMat start = model.embed_system(m.c.adjoint()).dense() * model.initial_state();
  double worst = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k)
    worst = std::max(worst, std::abs(c.values[k] - (a * ex.evolve(start, t[k])).trace()));
  CHECK(worst < 1e-4);

  try {
    system_correlation(m.c, m.c.adjoint(), Hierarchy(d, m.c, m.h, {6, HierarchyMode::even_standard}), rho0, t);
    FAIL("even-standard hierarchy accepted an odd displaced state");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_sector);
  }
}

TEST_CASE("lindblad correlation of an empty level decays at the odd-sector rate") {
  const double w = 0.7, gamma = 0.1;
  const fheom::testing::SingleMode m(w);
  const LindbladGenerator gen(m.h, m.c, gamma, 0.3);
  const auto t = linspace(0.0, 30.0, 61);
  const auto c = system_correlation(m.c, m.c.adjoint(), gen, m.projector(0), t);
  CHECK(c.solver == "lindblad");
  for (std::size_t k = 0; k < t.size(); ++k)
    CHECK(std::abs(c.values[k] - std::exp((-I * w - gamma) * t[k])) < 1e-10);
}

TEST_CASE("spectrum of a damped oscillation is a lorentzian") {
  const double w0 = 0.5, gamma = 0.1;
  const auto c = synthetic(w0, gamma, 200.0, 4001);
  const auto omega = linspace(-1.0, 2.0, 31);
  const Spectrum s = spectrum(c, omega);
  CHECK(s.t_max == 200.0);
  CHECK_FALSE(s.damping_time.has_value());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double x = omega[i] - w0;
    const double exact = 2.0 * gamma / (x * x + gamma * gamma);
    CHECK(s.values[i] == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("damping window adds its rate to the linewidth") {
  const auto c = synthetic(0.0, 0.05, 400.0, 8001);
  const std::vector<double> omega{0.0};
  const Spectrum s = spectrum(c, omega, 20.0);
  CHECK(s.damping_time == 20.0);
  CHECK(s.values[0] == doctest::Approx(2.0 / (0.05 + 1.0 / 20.0)).epsilon(1e-3));
}

TEST_CASE("spectrum input validation") {
  auto c = synthetic(0.0, 0.1, 10.0, 11);
  const std::vector<double> omega{0.0};
  CHECK_THROWS_AS(spectrum(c, omega, -1.0), Error);
  c.times[3] += 0.01;
  CHECK_THROWS_AS(spectrum(c, omega), Error);
  c.values.pop_back();
  CHECK_THROWS_AS(spectrum(c, omega), Error);
}

TEST_CASE("spectrum does not depend on the worker count") {
  const auto c = synthetic(0.3, 0.2, 50.0, 501);
  const auto omega = linspace(-3.0, 3.0, 97);
  setenv("FHEOM_NUM_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  const Spectrum serial = spectrum(c, omega);
  setenv("FHEOM_NUM_THREADS", "4", 1);
  CHECK(worker_count() == 4);
  const Spectrum threaded = spectrum(c, omega);
  unsetenv("FHEOM_NUM_THREADS");
  CHECK(serial.values == threaded.values);
}

TEST_CASE("parallel_for runs every index once and forwards exceptions") {
  setenv("FHEOM_NUM_THREADS", "3", 1);
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) fail(ErrorCode::solver, "boom");
                  }),
                  Error);
  unsetenv("FHEOM_NUM_THREADS");
}
