// soliton-spectra <command> --config <path> [--output-dir <path>] [--threads <k>]
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "soliton/config.hpp"
#include "soliton/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Profiles, linearization spectra and stability scans for solitary waves"};
  app.set_version_flag("--version", soliton::tool_version());
  std::string command, config_path, output_dir;
  std::optional<int> threads;
  app.add_option("command", command, "profile | spectrum | scan | virial | derrick | verify")->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--output-dir", output_dir, "overrides output.dir");
  app.add_option("--threads", threads, "parallel scan rows")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = soliton::load_config(config_path, soliton::parse_command(command));
    if (!output_dir.empty()) cfg.output.dir = output_dir;
    if (threads) cfg.threads = *threads;
    const int status = soliton::run(cfg, std::cout);
    if (status != 0) std::cerr << "soliton-spectra: " << command << " finished with failed checks\n";
    return status;
  } catch (const soliton::ConfigError& e) {
    std::cerr << "soliton-spectra: config error: " << e.what() << "\n";
    return 2;
  } catch (const soliton::SolverError& e) {
    std::cerr << "soliton-spectra: solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "soliton-spectra: " << e.what() << "\n";
    return 1;
  }
}
