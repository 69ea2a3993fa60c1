#include "fheom/fheom.h"

#include <new>
#include <string>

#include "fheom/cli.hpp"

struct fheom_config {
  fheom::cli::RunConfig value;
  std::string json;
};

struct fheom_result {
  fheom::cli::RunReport value;
};

namespace {

thread_local std::string last_error;

fheom_status status_of(fheom::ErrorCode code) {
  switch (code) {
    case fheom::ErrorCode::invalid_argument: return FHEOM_ERR_INVALID_ARGUMENT;
    case fheom::ErrorCode::config: return FHEOM_ERR_CONFIG;
    case fheom::ErrorCode::solver: return FHEOM_ERR_SOLVER;
    case fheom::ErrorCode::io: return FHEOM_ERR_IO;
    case fheom::ErrorCode::unsupported_sector: return FHEOM_ERR_UNSUPPORTED_SECTOR;
    case fheom::ErrorCode::quadrature: return FHEOM_ERR_QUADRATURE;
  }
  return FHEOM_ERR_INTERNAL;
}

template <class F>
fheom_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return FHEOM_OK;
  } catch (const fheom::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return FHEOM_ERR_INTERNAL;
}

fheom_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return FHEOM_ERR_INVALID_ARGUMENT;
}

fheom_status make_config(fheom::cli::RunConfig cfg, fheom_config** out) {
  auto* c = new fheom_config{std::move(cfg), {}};
  c->json = fheom::cli::config_to_json(c->value);
  *out = c;
  return FHEOM_OK;
}

template <class Action>
fheom_status execute(const fheom_config* config, fheom_result** out, Action action) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new fheom_result{action(config->value)}; });
}

}  // namespace

extern "C" {

const char* fheom_last_error(void) { return last_error.c_str(); }

const char* fheom_version(void) { return "1.0.0"; }

fheom_status fheom_config_load(const char* path, fheom_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { make_config(fheom::cli::parse_config(path), out); });
}

fheom_status fheom_config_parse(const char* json_text, fheom_config** out) {
  if (!json_text) return null_argument("json_text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { make_config(fheom::cli::parse_config_text(json_text), out); });
}

fheom_status fheom_config_set_output(fheom_config* config, const char* directory) {
  if (!config) return null_argument("config");
  if (!directory || !*directory) return null_argument("directory");
  return guarded([&] {
    config->value.output = directory;
    config->json = fheom::cli::config_to_json(config->value);
  });
}

const char* fheom_config_json(const fheom_config* config) { return config ? config->json.c_str() : ""; }

void fheom_config_free(fheom_config* config) { delete config; }

fheom_status fheom_run(const fheom_config* config, fheom_result** out) {
  return execute(config, out, [](const auto& c) { return fheom::cli::run(c); });
}

fheom_status fheom_verify(const fheom_config* config, fheom_result** out) {
  return execute(config, out, [](const auto& c) { return fheom::cli::verify(c); });
}

fheom_status fheom_decompose(const fheom_config* config, fheom_result** out) {
  return execute(config, out, [](const auto& c) { return fheom::cli::decompose(c); });
}

int fheom_result_exit_code(const fheom_result* result) { return result ? result->value.exit_code : 1; }

const char* fheom_result_summary(const fheom_result* result) {
  return result ? result->value.summary_json.c_str() : "";
}

void fheom_result_free(fheom_result* result) { delete result; }

}
