// cli.hpp - run configuration, validation, and the batch entry points behind the CLI
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fheom/bath.hpp"
#include "fheom/fock.hpp"
#include "fheom/heom.hpp"

namespace fheom::cli {

// c_mode, or its adjoint.
struct ModeOperator {
  int mode = 0;
  bool dagger = false;
};

using OperatorSpec = std::variant<ModeOperator, DenseMat>;
using InitialStateSpec = std::variant<std::vector<int>, DenseMat>;

struct SystemConfig {
  int n_modes = 1;
  std::vector<double> energies;
  std::vector<Hopping> hoppings;
  OperatorSpec coupling = ModeOperator{};
  InitialStateSpec initial_state = std::vector<int>{};
};

struct BathConfig {
  SpectralDensity density = DiscreteModes{};
  InverseTemperature beta = InverseTemperature::finite(1.0);
  double mu = 0.0;
  int n_matsubara = 10;
};

enum class Method { heom, lindblad, oracle };

struct SolverConfig {
  Method method = Method::heom;
  std::size_t depth = 4;
  double rtol = 1e-8;
  double atol = 1e-10;
  cplx alpha = I;
  HierarchyMode hierarchy = HierarchyMode::generalized;
};

struct TimeGrid {
  double t_final = 10.0;
  std::size_t n_points = 101;

  std::vector<double> points() const;
};

struct DynamicsTask {};

struct CorrelationTask {
  OperatorSpec a;
  OperatorSpec b;
};

struct SpectrumTask {
  OperatorSpec a;
  OperatorSpec b;
  double omega_min = -5.0;
  double omega_max = 5.0;
  std::size_t n_omega = 201;
  std::optional<double> damping_time;
};

struct VerifyThresholds {
  double heom_vs_exact = 1e-4;
  double trace = 1e-8;
  double reduction = 1e-12;
  double wick = 1e-10;
  double discrete_symmetry = 1e-10;
  double matsubara_symmetry = 1e-3;
};

struct VerifyTask {
  VerifyThresholds thresholds;
};

using Task = std::variant<DynamicsTask, CorrelationTask, SpectrumTask, VerifyTask>;

struct RunConfig {
  SystemConfig system;
  BathConfig bath;
  SolverConfig solver;
  TimeGrid time;
  Task task = DynamicsTask{};
  std::string output = "fheom_out";
};

// Carries every schema violation found, one per line.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig parse_config(const std::string& path);
// Fully resolved config, defaults included; parses back to an equal config.
std::string config_to_json(const RunConfig& config);

// Number of bath exponents the configured decomposition produces (0 for a flat band).
std::size_t exponent_count(const BathConfig& bath);

struct RunReport {
  int exit_code = 0;
  std::string summary_json;
  std::vector<std::string> artifacts;
};

// Writes artifacts under config.output. Exit code 0 success, 2 verification residual exceeded.
// Solver and IO failures throw Error.
RunReport run(const RunConfig& config);
// Runs the oracle suite regardless of the configured task.
RunReport verify(const RunConfig& config);
// Writes decomposition.json.
RunReport decompose(const RunConfig& config);

}  // namespace fheom::cli
