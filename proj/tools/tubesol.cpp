// Batch front-end: `tubesol <subcommand> --config FILE [--out DIR] [--seed N] [--override key=value]...`

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tubesol/cli/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace tubesol;
  CLI::App app{"Tubular-neighborhood solutions of semilinear elliptic equations"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::optional<unsigned long long> seed;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "flat key = value config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides the config's out)");
  app.add_option("--seed", seed, "rng seed (overrides the config's seed)");
  app.add_option("--override", overrides, "key=value, repeatable")->take_all();
  for (const auto& name : cli::subcommands()) app.add_subcommand(name);
  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    cli::KeyValues kv = cli::read_document(config_path);
    for (const auto& o : overrides) cli::apply_override(kv, o);
    if (!out_dir.empty()) kv["out"] = out_dir;
    if (seed) kv["seed"] = std::to_string(*seed);
    const cli::RunConfig config = cli::interpret(kv);
    const auto artifacts = cli::run(subcommand, config);
    cli::write_artifacts(config.out, config, artifacts);
    for (const auto& [name, body] : artifacts) std::cout << (std::filesystem::path(config.out) / name).string() << '\n';
  } catch (const Error& e) {
    std::cerr << "tubesol " << subcommand << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "tubesol " << subcommand << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
