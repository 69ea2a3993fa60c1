// Command-line front end. Numerics come from the JSON config; flags only pick paths and verbosity.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "fheom/fheom.h"

namespace {

struct ConfigHandle {
  fheom_config* ptr = nullptr;
  ~ConfigHandle() { fheom_config_free(ptr); }
};

struct ResultHandle {
  fheom_result* ptr = nullptr;
  ~ResultHandle() { fheom_result_free(ptr); }
};

using Command = fheom_status (*)(const fheom_config*, fheom_result**);

int execute(Command command, const std::string& config_path, const std::string& output_dir, bool verbose) {
  ConfigHandle config;
  if (fheom_config_load(config_path.c_str(), &config.ptr) != FHEOM_OK) {
    std::fprintf(stderr, "fheom: %s\n", fheom_last_error());
    return 1;
  }
  if (!output_dir.empty() && fheom_config_set_output(config.ptr, output_dir.c_str()) != FHEOM_OK) {
    std::fprintf(stderr, "fheom: %s\n", fheom_last_error());
    return 1;
  }
  ResultHandle result;
  if (command(config.ptr, &result.ptr) != FHEOM_OK) {
    std::fprintf(stderr, "fheom: %s\n", fheom_last_error());
    return 1;
  }
  const int code = fheom_result_exit_code(result.ptr);
  if (verbose || code != 0) std::fputs(fheom_result_summary(result.ptr), stdout);
  if (code == 2) std::fprintf(stderr, "fheom: verification residual exceeded its threshold\n");
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fermionic open-system dynamics: generalized HEOM, Lindblad, exact oracle"};
  app.set_version_flag("--version", std::string(fheom_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  bool verbose = false;
  Command command = nullptr;

  const struct {
    const char* name;
    const char* help;
    Command fn;
  } commands[] = {
      {"run", "Run the configured task and write CSV plus summary.json", fheom_run},
      {"verify", "Run the oracle verification suite; exit 2 if a residual exceeds its threshold",
       fheom_verify},
      {"decompose", "Write the bath exponent decomposition to decomposition.json", fheom_decompose},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", output_dir, "Override the config's output directory");
    sub->add_flag("-v,--verbose", verbose, "Print the summary JSON");
    sub->callback([&command, fn = c.fn] { command = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return execute(command, config_path, output_dir, verbose);
}
