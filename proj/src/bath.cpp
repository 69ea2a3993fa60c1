#include "fheom/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include "json.hpp"

namespace fheom {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

using boost::math::quadrature::gauss_kronrod;

constexpr double kPi = std::numbers::pi;

// n^sigma on the real axis.
double occupation(Sigma sigma, double omega, const InverseTemperature& beta, double mu) {
  return sigma == Sigma::plus ? fermi_dirac(omega, beta, mu)
                              : fermi_dirac(2.0 * mu - omega, beta, mu);
}

cplx occupation(Sigma sigma, cplx omega, const InverseTemperature& beta, double mu) {
  if (beta.is_zero_temperature()) {
    // Only reached off the real axis in the tails, where the step is constant.
    const double n = omega.real() < mu ? 1.0 : 0.0;
    return sigma == Sigma::plus ? n : 1.0 - n;
  }
  return sigma == Sigma::plus ? fermi_dirac(omega, beta.value(), mu)
                              : fermi_dirac(2.0 * mu - omega, beta.value(), mu);
}

struct QuadratureResult {
  cplx value;
  double error;
};

QuadratureResult integrate(auto&& f, double a, double b, double tol) {
  double err = 0.0;
  const cplx v = gauss_kronrod<double, 31>::integrate(f, a, b, 18, tol, &err);
  return {v, err};
}

cplx lorentzian_correlation(const Lorentzian& j, const InverseTemperature& beta, double mu,
                            Sigma sigma, double tau) {
  const double s = sign(sigma);
  auto integrand = [&](cplx omega) {
    return j(omega) * std::exp(I * s * omega * tau) * occupation(sigma, omega, beta, mu) / kPi;
  };

  // The tails are handled exactly below, so the window only sets where adaptivity is spent.
  const double thermal =
      beta.is_zero_temperature() || beta.value() == 0.0 ? 0.0 : 20.0 / beta.value();
  const double reach = std::max(50.0 * j.width, std::min(thermal, 1e3 * j.width));
  const double lo = std::min(j.center, mu) - reach;
  const double hi = std::max(j.center, mu) + reach;
  const double scale = j.gamma * j.width;
  const double tol = 1e-12;

  std::vector<double> cuts{lo, hi};
  if (mu > lo && mu < hi) cuts.insert(cuts.begin() + 1, mu);
  if (j.center > lo && j.center < hi && j.center != mu) {
    cuts.push_back(j.center);
    std::sort(cuts.begin(), cuts.end());
  }

  cplx total{};
  double error = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    auto r = integrate([&](double w) { return integrand(cplx{w, 0.0}); }, cuts[k], cuts[k + 1], tol);
    total += r.value;
    error += r.error;
  }

  const double inf = std::numeric_limits<double>::infinity();
  if (std::abs(tau) < 1e-14) {
    auto right = integrate([&](double w) { return integrand(cplx{w, 0.0}); }, hi, inf, tol);
    auto left = integrate([&](double w) { return integrand(cplx{w, 0.0}); }, -inf, lo, tol);
    total += right.value + left.value;
    error += right.error + left.error;
  } else {
    // Tails continued onto vertical rays where exp(i sigma w tau) decays; no poles are crossed
    // because both the Lorentzian and the Fermi poles sit at real parts inside [lo, hi].
    const double dir = s * tau > 0.0 ? 1.0 : -1.0;
    auto right = integrate([&](double y) { return integrand(cplx{hi, dir * y}); }, 0.0, inf, tol);
    auto left = integrate([&](double y) { return integrand(cplx{lo, dir * y}); }, 0.0, inf, tol);
    total += I * dir * right.value - I * dir * left.value;
    error += right.error + left.error;
  }

  if (!std::isfinite(total.real()) || !std::isfinite(total.imag()) ||
      error > 1e-8 * std::max(scale, std::abs(total)))
    fail(ErrorCode::quadrature, "correlation quadrature did not converge: error estimate " +
                                    std::to_string(error) + " at tau=" + std::to_string(tau));
  return total;
}

}  // namespace

cplx Lorentzian::operator()(cplx omega) const {
  const cplx d = omega - center;
  return gamma * width * width / (d * d + width * width);
}

void validate(const BathSpec& bath) {
  std::visit(overloaded{
                 [](const FlatBand& f) {
                   if (!(f.gamma >= 0.0)) fail(ErrorCode::invalid_argument, "flat band needs gamma >= 0");
                   if (!(f.n0 >= 0.0 && f.n0 <= 1.0))
                     fail(ErrorCode::invalid_argument, "flat band needs n0 in [0, 1]");
                 },
                 [](const Lorentzian& l) {
                   if (!(l.gamma >= 0.0)) fail(ErrorCode::invalid_argument, "Lorentzian needs gamma >= 0");
                   if (!(l.width > 0.0)) fail(ErrorCode::invalid_argument, "Lorentzian needs width > 0");
                   if (!std::isfinite(l.center))
                     fail(ErrorCode::invalid_argument, "Lorentzian center must be finite");
                 },
                 [](const DiscreteModes& d) {
                   if (d.modes.empty()) fail(ErrorCode::invalid_argument, "discrete bath has no modes");
                   for (const auto& m : d.modes)
                     if (!std::isfinite(m.coupling) || !std::isfinite(m.energy))
                       fail(ErrorCode::invalid_argument, "discrete bath mode must be finite");
                 },
             },
             bath.density);
}

double markov_rate(const FlatBand& band, Sigma sigma) {
  const double s = sign(sigma);
  return band.gamma * (1.0 - s + 2.0 * s * band.n0);
}

cplx CorrelationDecomposition::evaluate(Sigma sigma, double tau) const {
  if (tau < 0.0 && origin.kind == DecompositionOrigin::Kind::matsubara)
    return std::conj(evaluate(sigma, -tau));
  cplx sum{};
  for (const auto& e : exponents)
    if (e.sigma == sigma) sum += e.a * std::exp(-e.b * tau);
  return sum;
}

std::optional<std::size_t> CorrelationDecomposition::partner(std::size_t j) const {
  const auto& e = exponents.at(j);
  for (std::size_t k = 0; k < exponents.size(); ++k)
    if (exponents[k].term == e.term && exponents[k].sigma == flip(e.sigma)) return k;
  return std::nullopt;
}

cplx correlation_exact(const BathSpec& bath, Sigma sigma, double t2, double t1) {
  validate(bath);
  const double tau = t2 - t1;
  return std::visit(
      overloaded{
          [&](const FlatBand&) -> cplx {
            fail(ErrorCode::invalid_argument,
                 "flat band correlations are delta functions; use markov_rate");
          },
          [&](const Lorentzian& l) { return lorentzian_correlation(l, bath.beta, bath.mu, sigma, tau); },
          [&](const DiscreteModes& d) {
            const double s = sign(sigma);
            cplx sum{};
            for (const auto& m : d.modes)
              sum += m.coupling * m.coupling * std::exp(I * s * m.energy * tau) *
                     occupation(sigma, m.energy, bath.beta, bath.mu);
            return sum;
          },
      },
      bath.density);
}

CorrelationDecomposition decompose_discrete(const BathSpec& bath) {
  validate(bath);
  const auto* d = std::get_if<DiscreteModes>(&bath.density);
  if (!d) fail(ErrorCode::invalid_argument, "decompose_discrete needs a discrete spectral density");
  CorrelationDecomposition out{{}, {DecompositionOrigin::Kind::discrete_exact, 0}};
  int term = 0;
  for (const auto& m : d->modes) {
    for (Sigma sigma : {Sigma::plus, Sigma::minus}) {
      const double g2 = m.coupling * m.coupling;
      out.exponents.push_back({sigma, g2 * occupation(sigma, m.energy, bath.beta, bath.mu),
                               -I * double(sign(sigma)) * m.energy, term});
    }
    ++term;
  }
  return out;
}

CorrelationDecomposition decompose_matsubara(const BathSpec& bath, int n_matsubara) {
  validate(bath);
  const auto* j = std::get_if<Lorentzian>(&bath.density);
  if (!j) fail(ErrorCode::invalid_argument, "decompose_matsubara needs a Lorentzian spectral density");
  if (bath.beta.is_zero_temperature())
    fail(ErrorCode::invalid_argument, "Matsubara decomposition requires finite temperature");
  if (n_matsubara < 1) fail(ErrorCode::invalid_argument, "n_matsubara must be at least 1");
  const double beta = bath.beta.value();
  if (!(beta > 0.0)) fail(ErrorCode::invalid_argument, "Matsubara decomposition requires beta > 0");
  const double mu = bath.mu;
  const double gw = j->gamma * j->width;

  CorrelationDecomposition out{{}, {DecompositionOrigin::Kind::matsubara, n_matsubara}};
  const cplx pole_up{j->center, j->width};
  const cplx pole_down{j->center, -j->width};
  out.exponents.push_back({Sigma::plus, gw * fermi_dirac(pole_up, beta, mu), j->width - I * j->center, 0});
  out.exponents.push_back(
      {Sigma::minus, gw * (1.0 - fermi_dirac(pole_down, beta, mu)), j->width + I * j->center, 0});
  for (int k = 1; k <= n_matsubara; ++k) {
    const double nu = (2.0 * k - 1.0) * kPi / beta;
    if (std::abs(nu - j->width) < 1e-12 && std::abs(mu - j->center) < 1e-12)
      fail(ErrorCode::invalid_argument, "Matsubara frequency coincides with the Lorentzian pole");
    const cplx amp_up = -2.0 * I / beta * (*j)(cplx{mu, nu});
    const cplx amp_down = -2.0 * I / beta * (*j)(cplx{mu, -nu});
    out.exponents.push_back({Sigma::plus, amp_up, nu - I * mu, k});
    out.exponents.push_back({Sigma::minus, amp_down, nu + I * mu, k});
  }
  return out;
}

SymmetryReport check_decomposition_symmetries(const CorrelationDecomposition& d,
                                              const BathSpec& bath, std::vector<double> taus) {
  validate(bath);
  SymmetryReport report;
  if (std::holds_alternative<FlatBand>(bath.density)) return report;

  if (taus.empty()) {
    double lo = 0.0, hi = 10.0;
    if (const auto* l = std::get_if<Lorentzian>(&bath.density)) {
      lo = 0.1 / l->width;
      hi = 10.0 / l->width;
    }
    for (int k = 0; k < 100; ++k) taus.push_back(lo + (hi - lo) * k / 99.0);
  }
  report.samples = static_cast<int>(taus.size());

  std::vector<cplx> ref_minus(taus.size());
  double scale = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    ref_minus[k] = correlation_exact(bath, Sigma::minus, taus[k], 0.0);
    scale = std::max({scale, std::abs(ref_minus[k]), std::abs(d.evaluate(Sigma::plus, taus[k]))});
  }
  if (scale == 0.0) scale = 1.0;

  double conj_res = 0.0;
  for (double tau : taus)
    for (Sigma s : {Sigma::plus, Sigma::minus})
      conj_res = std::max(conj_res, std::abs(std::conj(d.evaluate(s, tau)) - d.evaluate(s, -tau)));
  report.conjugation = conj_res / scale;

  if (bath.beta.is_zero_temperature()) return report;
  const double beta = bath.beta.value();
  const double mu = bath.mu;

  // C^-(-tau) from the reference against e^{-beta mu} C^+_dec(tau - i beta).
  double kms_res = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    cplx shifted{};
    for (const auto& e : d.exponents)
      if (e.sigma == Sigma::plus) shifted += e.a * std::exp(-e.b * cplx{taus[k], -beta} - beta * mu);
    kms_res = std::max(kms_res, std::abs(std::conj(ref_minus[k]) - shifted));
  }
  report.kms = kms_res / scale;

  double a_scale = 0.0, b_scale = 0.0;
  for (const auto& e : d.exponents) {
    a_scale = std::max(a_scale, std::abs(e.a));
    b_scale = std::max(b_scale, std::abs(e.b));
  }
  a_scale = a_scale > 0.0 ? a_scale : 1.0;
  b_scale = b_scale > 0.0 ? b_scale : 1.0;
  double pair_res = 0.0;
  for (std::size_t j = 0; j < d.exponents.size(); ++j) {
    const auto& plus = d.exponents[j];
    if (plus.sigma != Sigma::plus) continue;
    const auto p = d.partner(j);
    if (!p) {
      pair_res = std::numeric_limits<double>::infinity();
      continue;
    }
    const auto& minus = d.exponents[*p];
    const cplx predicted = std::exp(-beta * (mu - I * plus.b)) * plus.a;
    pair_res = std::max({pair_res, std::abs(std::conj(minus.a) - predicted) / a_scale,
                         std::abs(std::conj(minus.b) - plus.b) / b_scale});
  }
  report.pairing = pair_res;
  return report;
}

std::string decomposition_to_json(const CorrelationDecomposition& d) {
  nlohmann::json exps = nlohmann::json::array();
  for (const auto& e : d.exponents)
    exps.push_back({{"sigma", sign(e.sigma)},
                    {"a", {e.a.real(), e.a.imag()}},
                    {"b", {e.b.real(), e.b.imag()}},
                    {"term", e.term}});
  nlohmann::json origin = {{"kind", d.origin.kind == DecompositionOrigin::Kind::matsubara
                                        ? "matsubara"
                                        : "discrete_exact"}};
  if (d.origin.kind == DecompositionOrigin::Kind::matsubara)
    origin["n_matsubara"] = d.origin.n_matsubara;
  return nlohmann::json{{"origin", origin}, {"exponents", exps}}.dump(2);
}

CorrelationDecomposition decomposition_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    CorrelationDecomposition d;
    const auto& origin = doc.at("origin");
    if (origin.at("kind") == "matsubara") {
      d.origin = {DecompositionOrigin::Kind::matsubara, origin.at("n_matsubara").get<int>()};
    } else if (origin.at("kind") == "discrete_exact") {
      d.origin = {DecompositionOrigin::Kind::discrete_exact, 0};
    } else {
      fail(ErrorCode::invalid_argument, "unknown decomposition origin");
    }
    for (const auto& e : doc.at("exponents")) {
      const int s = e.at("sigma").get<int>();
      if (s != 1 && s != -1) fail(ErrorCode::invalid_argument, "sigma must be +1 or -1");
      d.exponents.push_back({s == 1 ? Sigma::plus : Sigma::minus,
                             {e.at("a").at(0).get<double>(), e.at("a").at(1).get<double>()},
                             {e.at("b").at(0).get<double>(), e.at("b").at(1).get<double>()},
                             e.at("term").get<int>()});
    }
    return d;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::invalid_argument, std::string("malformed decomposition JSON: ") + ex.what());
  }
}

}  // namespace fheom
