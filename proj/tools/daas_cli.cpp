// Command-line front end for the experiment harness.
//
//   daas sample      [--config FILE] [overrides...] [--out FILE]
//   daas convergence ...
//   daas refinement  ...
//   daas cost        ...
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "daas/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> assignments;  // --set key=value, applied last
};

// Registers one flag per configuration key; values are applied in key order.
void add_config_flags(CLI::App* cmd, Overrides& o, std::map<std::string, std::string>& values) {
  cmd->add_option("-c,--config", o.config_path, "key=value configuration file");
  cmd->add_option("-o,--out", o.out_path, "output path (default: standard output)");
  cmd->add_option("--set", o.assignments, "extra key=value override (repeatable)");
  const std::vector<std::pair<std::string, std::string>> keys{
      {"--seed", "seed"},         {"-N,--freqs", "N"},      {"-K,--grid", "K"},
      {"--ks", "ks"},             {"-D,--kernel", "D"},     {"--degrees", "degrees"},
      {"-S,--samples", "S"},      {"-T,--steps", "T"},      {"--ts", "ts"},
      {"--eps-ula", "eps_ula"},   {"--eps-mala", "eps_mala"}, {"--schedule", "schedule"},
      {"--method", "method"},     {"--trials", "trials"},   {"--reference", "reference"},
      {"--tol", "tol"},           {"--model", "model"}};
  for (const auto& [flag, key] : keys) {
    cmd->add_option(flag, values[key], "config key '" + key + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretized approximate ancestral sampling for Fourier basis density models"};
  app.require_subcommand(1);

  Overrides overrides;
  std::map<std::string, std::string> values;
  struct Entry {
    CLI::App* cmd;
    daas::Command command;
  };
  std::vector<Entry> commands{
      {app.add_subcommand("sample", "draw samples and write them as CSV"), daas::Command::sample},
      {app.add_subcommand("convergence", "KL divergence versus K sweep"), daas::Command::convergence},
      {app.add_subcommand("refinement", "W1 versus Langevin refinement steps"), daas::Command::refinement},
      {app.add_subcommand("cost", "model-evaluation ledger per sampling method"), daas::Command::cost}};
  for (auto& entry : commands) add_config_flags(entry.cmd, overrides, values);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    daas::ExperimentConfig cfg;
    if (!overrides.config_path.empty()) {
      std::ifstream in(overrides.config_path);
      if (!in) throw daas::ConfigError("cannot open config file '" + overrides.config_path + "'");
      cfg = daas::parse_config(in);
    }
    for (const auto& [key, value] : values) {
      if (!value.empty()) daas::apply_setting(cfg, key, value);
    }
    for (const auto& assignment : overrides.assignments) daas::apply_assignment(cfg, assignment);

    std::ofstream file;
    if (!overrides.out_path.empty()) {
      file.open(overrides.out_path);
      if (!file) throw daas::ConfigError("cannot open output file '" + overrides.out_path + "'");
    }
    std::ostream& out = overrides.out_path.empty() ? std::cout : file;

    for (const auto& entry : commands) {
      if (!entry.cmd->parsed()) continue;
      switch (entry.command) {
        case daas::Command::sample:
          daas::cmd_sample(cfg, out);
          break;
        case daas::Command::convergence:
          daas::cmd_convergence(cfg, out);
          break;
        case daas::Command::refinement:
          daas::cmd_refinement(cfg, out);
          break;
        case daas::Command::cost:
          daas::cmd_cost(cfg, out);
          break;
      }
    }
    out.flush();
    if (!out) throw daas::NumericalError("failed writing output");
  } catch (const daas::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const daas::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
