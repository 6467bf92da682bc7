// Campaign command line: sdrom <train|basis|sample|run|report|all> --config file.ini

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdrom/campaign.hpp"
#include "sdrom/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Schwarz-coupled FOM/PROM/HPROM campaign driver"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "campaign config (INI)")->required()->check(CLI::ExistingFile);
  app.add_option("--output", output, "output directory (overrides run.output)");
  app.add_option("--seed", seed, "sample-mesh RNG seed (overrides run.seed)");
  app.add_option("--override", overrides, "section.key=value, repeatable")->take_all();

  auto* train = app.add_subcommand("train", "monolithic FOM training runs");
  auto* basis = app.add_subcommand("basis", "POD bases from the training snapshots");
  auto* sample = app.add_subcommand("sample", "sample meshes for hyper-reduction");
  auto* run = app.add_subcommand("run", "test-parameter runs and error metrics");
  auto* report = app.add_subcommand("report", "CSV tables from the run records");
  auto* all = app.add_subcommand("all", "every stage in order");
  for (auto* sc : {train, basis, sample, run, report, all}) sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    auto ini = sdrom::IniFile::load(config_path);
    for (const auto& o : overrides) ini.apply_override(o);
    if (!output.empty()) ini.set("run.output", output);
    if (seed) ini.set("run.seed", std::to_string(*seed));
    sdrom::Campaign campaign(sdrom::config_from_ini(ini));
    std::cerr << "config hash " << sdrom::config_hash(campaign.config()) << "\n";

    if (train->parsed()) campaign.train();
    if (basis->parsed()) campaign.basis();
    if (sample->parsed()) campaign.sample();
    if (run->parsed()) {
      const auto records = campaign.run();
      int failed = 0;
      for (const auto& r : records) failed += r.ok() ? 0 : 1;
      std::cerr << records.size() << " runs, " << failed << " failed\n";
    }
    if (report->parsed()) campaign.report();
    if (all->parsed()) campaign.run_all();
  } catch (const sdrom::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
