#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "fheom/fheom.h"

namespace fs = std::filesystem;

namespace {

const char* kDynamics = R"({
  "system": {"n_modes": 1, "energies": [1.0], "coupling": {"mode": 0},
             "initial_state": {"occupations": [1]}},
  "bath": {"spectral_density": {"type": "discrete", "modes": [{"coupling": 0.05, "energy": 0.6}]},
           "beta": 2.0},
  "solver": {"depth": 2},
  "time": {"t_final": 1.0, "n_points": 5},
  "task": {"type": "dynamics"}
})";

std::string scratch(const char* tag) {
  return (fs::temp_directory_path() / (std::string("fheom_test_capi_") + tag + "_" + std::to_string(::getpid())))
      .string();
}

}  // namespace

TEST_CASE("parse, run and free through the C interface") {
  fheom_config* cfg = nullptr;
  REQUIRE(fheom_config_parse(kDynamics, &cfg) == FHEOM_OK);
  REQUIRE(cfg != nullptr);
  CHECK(std::string(fheom_last_error()).empty());
  CHECK(std::string(fheom_config_json(cfg)).find("\"depth\": 2") != std::string::npos);

  const std::string out = scratch("run");
  REQUIRE(fheom_config_set_output(cfg, out.c_str()) == FHEOM_OK);
  fheom_result* res = nullptr;
  REQUIRE(fheom_run(cfg, &res) == FHEOM_OK);
  CHECK(fheom_result_exit_code(res) == 0);
  CHECK(std::string(fheom_result_summary(res)).find("\"command\": \"run\"") != std::string::npos);
  CHECK(fs::exists(fs::path(out) / "trajectory.csv"));
  CHECK(fs::exists(fs::path(out) / "summary.json"));
  fheom_result_free(res);

  REQUIRE(fheom_decompose(cfg, &res) == FHEOM_OK);
  CHECK(fs::exists(fs::path(out) / "decomposition.json"));
  fheom_result_free(res);

  REQUIRE(fheom_verify(cfg, &res) == FHEOM_OK);
  CHECK(fheom_result_exit_code(res) == 0);
  fheom_result_free(res);

  fheom_config_free(cfg);
  fs::remove_all(out);
}

TEST_CASE("errors map to status codes with a message") {
  fheom_config* cfg = nullptr;
  CHECK(fheom_config_parse("{\"bogus\": 1}", &cfg) == FHEOM_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(fheom_last_error()).find("/bogus: unknown key") != std::string::npos);

  CHECK(fheom_config_load("/nonexistent/fheom.json", &cfg) == FHEOM_ERR_IO);
  CHECK(fheom_config_parse(nullptr, &cfg) == FHEOM_ERR_INVALID_ARGUMENT);
  CHECK(fheom_run(nullptr, nullptr) == FHEOM_ERR_INVALID_ARGUMENT);

  REQUIRE(fheom_config_parse(kDynamics, &cfg) == FHEOM_OK);
  CHECK(fheom_config_set_output(cfg, "") == FHEOM_ERR_INVALID_ARGUMENT);
  // A regular file where the output directory should go.
  const std::string blocker = scratch("blocker");
  std::FILE* f = std::fopen(blocker.c_str(), "w");
  REQUIRE(f != nullptr);
  std::fclose(f);
  REQUIRE(fheom_config_set_output(cfg, blocker.c_str()) == FHEOM_OK);
  fheom_result* res = nullptr;
  CHECK(fheom_run(cfg, &res) == FHEOM_ERR_IO);
  CHECK(res == nullptr);
  fs::remove(blocker);
  fheom_config_free(cfg);

  fheom_config_free(nullptr);
  fheom_result_free(nullptr);
  CHECK(fheom_result_exit_code(nullptr) == 1);
}

TEST_CASE("shipped benchmark loads from disk") {
  fheom_config* cfg = nullptr;
  REQUIRE(fheom_config_load(FHEOM_CONFIG_DIR "/benchmark_three_mode.json", &cfg) == FHEOM_OK);
  CHECK(std::string(fheom_config_json(cfg)).find("\"type\": \"verify\"") != std::string::npos);
  CHECK(std::string(fheom_version()).size() > 0);
  fheom_config_free(cfg);
}
