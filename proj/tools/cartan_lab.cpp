// cartan-lab: runs a configured experiment and writes a machine-readable report.

#include "cartan/lab/registry.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace lab = cartan::lab;

namespace {

int run_command(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                const std::optional<std::string>& out, const std::optional<std::string>& format) {
  lab::ExperimentConfig cfg = lab::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (out) cfg.output = *out;
  if (format) cfg.format = lab::parse_format(*format);

  const lab::Report report = lab::run(cfg);
  const std::string bytes = lab::serialize(report, cfg.format);

  if (!cfg.output.empty()) {
    std::filesystem::create_directories(cfg.output);
    const auto path = std::filesystem::path(cfg.output) / lab::report_filename(report, cfg.format);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw lab::ConfigError("cannot write " + path.string());
    file << bytes;
  }
  std::cout << bytes;
  return report.verdict ? 0 : 1;
}

void list_command() {
  std::cout << "models:\n";
  for (const auto& m : lab::model_registry()) {
    std::cout << "  " << m.name;
    for (const auto& a : m.aliases) std::cout << " (" << a << ")";
    std::cout << "\n    " << m.description << "\n    params: " << m.defaults.dump() << "\n";
  }
  std::cout << "experiments:\n";
  for (const auto& e : lab::experiment_registry()) {
    std::cout << "  " << e.name << " [" << e.default_samples << " samples]\n    " << e.description << "\n";
    for (const auto& c : e.checks) {
      std::cout << "      " << c.name << (c.bound == lab::Bound::Upper ? " <= " : " >= ") << c.tolerance << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on Cartan connections of Lie groupoids"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  run->add_option("--config,-c", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out, "output directory (overrides config)");
  run->add_option("--format", format, "json or csv (overrides config)")->check(CLI::IsMember({"json", "csv"}));

  auto* list = app.add_subcommand("list", "list models, experiments and their checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      list_command();
      return 0;
    }
    return run_command(config_path, seed, out, format);
  } catch (const lab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
