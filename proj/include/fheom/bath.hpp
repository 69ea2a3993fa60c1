// bath.hpp - spectral densities, two-time bath correlations and their exponential decompositions
//
// C^sigma(tau) = int dw/pi J(w) exp(i sigma w tau) n^sigma(w), n^sigma = (1 - sigma + 2 sigma n_F)/2.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fheom/thermal.hpp"
#include "fheom/types.hpp"

namespace fheom {

struct FlatBand {
  double gamma;
  double n0;
};

struct Lorentzian {
  double gamma;
  double width;
  double center;

  cplx operator()(cplx omega) const;
};

struct BathMode {
  double coupling;
  double energy;
};

struct DiscreteModes {
  std::vector<BathMode> modes;
};

using SpectralDensity = std::variant<FlatBand, Lorentzian, DiscreteModes>;

struct BathSpec {
  SpectralDensity density;
  InverseTemperature beta;
  double mu = 0.0;
};

void validate(const BathSpec& bath);

// Markovian rate Gamma^sigma = Gamma (1 - sigma + 2 sigma n0) of a flat band.
double markov_rate(const FlatBand& band, Sigma sigma);

struct BathExponent {
  Sigma sigma;
  cplx a;
  cplx b;
  // Exponents sharing `term` with opposite sigma are conjugation partners.
  int term;
};

struct DecompositionOrigin {
  enum class Kind { discrete_exact, matsubara } kind;
  int n_matsubara = 0;
};

struct CorrelationDecomposition {
  std::vector<BathExponent> exponents;
  DecompositionOrigin origin;

  cplx evaluate(Sigma sigma, double tau) const;
  // Index of the exponent with the same term and flipped sigma.
  std::optional<std::size_t> partner(std::size_t j) const;
};

// Throws Error(quadrature) when the adaptive quadrature misses its tolerance.
cplx correlation_exact(const BathSpec& bath, Sigma sigma, double t2, double t1);

CorrelationDecomposition decompose_discrete(const BathSpec& bath);
CorrelationDecomposition decompose_matsubara(const BathSpec& bath, int n_matsubara);

struct SymmetryReport {
  // Negative values mean "not applicable".
  double conjugation = -1.0;
  double kms = -1.0;
  double pairing = -1.0;
  int samples = 0;

  bool applicable() const { return conjugation >= 0.0; }
};

// tau samples default to 100 points on [0.1/W, 10/W] (Lorentzian) or [0, 10] (discrete).
SymmetryReport check_decomposition_symmetries(const CorrelationDecomposition& d,
                                              const BathSpec& bath,
                                              std::vector<double> taus = {});

// {"sigma": +-1, "a": [re, im], "b": [re, im]} list, plus origin metadata.
std::string decomposition_to_json(const CorrelationDecomposition& d);
CorrelationDecomposition decomposition_from_json(const std::string& text);

}  // namespace fheom
