#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ntklab/commands.hpp"

namespace {

// NTKLAB_OUT_ROOT provides the default parent for --out.
std::filesystem::path default_out(const std::string& sub) {
  const char* root = std::getenv("NTKLAB_OUT_ROOT");
  if (!root || !*root) return {};
  return std::filesystem::path(root) / sub;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-task training laboratory with kernel-spectrum task weighting"};
  app.require_subcommand(1);

  using ntklab::commands::Command;
  Command cmd;
  std::string out;
  std::string config;
  std::vector<std::string> archives;
  std::string values_csv;
  long long seed_override = -1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", config, "configuration file")->required();
    }
    sub->add_option("--out", out, "output directory (default: $NTKLAB_OUT_ROOT/<subcommand>)");
    sub->add_option("--workers", cmd.workers, "parallel child runs")->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", seed_override, "replace configured seed(s)");
  };

  CLI::App* train = app.add_subcommand("train", "run one training configuration");
  add_common(train, true);
  CLI::App* bench = app.add_subcommand("bench", "run a benchmark suite with STL baselines");
  add_common(bench, true);
  CLI::App* dynamics =
      app.add_subcommand("dynamics", "validate kernel-ODE training-error predictions");
  add_common(dynamics, true);
  CLI::App* sweep = app.add_subcommand("sweep", "sweep one parameter over a value list");
  add_common(sweep, true);
  sweep->add_option("--param", cmd.sweep_param, "parameter name, e.g. strategy.n")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")->required();
  CLI::App* report = app.add_subcommand("report", "emit plot data from archives");
  report->add_option("--archives", archives, "archive directories")->required();
  report->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) cmd.kind = Command::Kind::train;
  if (bench->parsed()) cmd.kind = Command::Kind::bench;
  if (dynamics->parsed()) cmd.kind = Command::Kind::dynamics;
  if (sweep->parsed()) cmd.kind = Command::Kind::sweep;
  if (report->parsed()) cmd.kind = Command::Kind::report;

  cmd.config_path = config;
  for (const std::string& a : archives) cmd.archives.emplace_back(a);
  if (seed_override >= 0) cmd.seed_override = static_cast<std::uint64_t>(seed_override);

  if (!values_csv.empty()) {
    std::size_t pos = 0;
    while (pos <= values_csv.size()) {
      const std::size_t next = values_csv.find(',', pos);
      const std::string item =
          values_csv.substr(pos, (next == std::string::npos ? values_csv.size() : next) - pos);
      if (!item.empty()) {
        try {
          cmd.sweep_values.push_back(std::stod(item));
        } catch (const std::exception&) {
          std::cerr << "config error: bad sweep value '" << item << "'\n";
          return 2;
        }
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
  }

  if (out.empty()) {
    const char* names[] = {"train", "bench", "dynamics", "sweep", "report"};
    cmd.out_dir = default_out(names[static_cast<int>(cmd.kind)]);
  } else {
    cmd.out_dir = out;
  }

  return ntklab::commands::run(cmd);
}
