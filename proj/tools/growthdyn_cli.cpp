#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "growthdyn/config.hpp"
#include "growthdyn/errors.hpp"
#include "growthdyn/report.hpp"

using namespace growthdyn;

namespace {

Json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("--config", "cannot open '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw UsageError("--config", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonuniform dichotomies under general growth rates"};
  std::string command;
  std::string config_path;
  CliOverrides overrides;
  app.add_option("command", command, "Command to run when no config is given (e.g. paper-examples)");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", overrides.out, "Output directory");
  app.add_option("--format", overrides.format, "json or json+csv");
  app.add_option("--seed", overrides.seed, "Pair-grid seed");
  app.add_option("--window-scale", overrides.window_scale, "Multiplier for every initial window");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    Json raw;
    std::string base_dir;
    if (!config_path.empty()) {
      raw = load_config(config_path);
      base_dir = std::filesystem::path(config_path).parent_path().string();
      if (!command.empty()) {
        if (raw.contains("command") && raw["command"] != command) {
          throw UsageError("command", "positional command disagrees with the config");
        }
        raw["command"] = command;
      }
    } else if (!command.empty()) {
      raw = Json{{"command", command}};
    } else {
      throw UsageError("--config", "either --config or a command is required");
    }
    const Json config = normalize_config(raw, overrides, base_dir);
    const Report report = run(config);
    const std::string dir = config["output"]["dir"].get<std::string>();
    write_report(report, dir, config["output"]["format"].get<std::string>());
    const Json& verdict = report.document["verdict"];
    std::cout << config["command"].get<std::string>() << ": " << verdict["status"].get<std::string>() << " ("
              << (std::filesystem::path(dir) / "report.json").string() << ")\n";
    for (const auto& f : verdict["failed_checks"]) std::cout << "  failed: " << f.get<std::string>() << '\n';
    for (const auto& f : verdict["falsifications"]) std::cout << "  falsified: " << f.get<std::string>() << '\n';
    return report.pass ? kExitPass : kExitFailure;
  } catch (const UsageError& e) {
    std::cerr << "usage error [" << e.field() << "]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
