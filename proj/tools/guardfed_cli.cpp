#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "guardfed/experiment.hpp"
#include "guardfed/results.hpp"

namespace fs = std::filesystem;
using namespace guardfed;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(' ');
    const auto b = item.find_last_not_of(' ');
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void write_dataset_csv(std::ostream& out, const SyntheticDataset& synth) {
  const auto& data = synth.data;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t j = 0; j < data.cols(); ++j) out << csv_field(data.column(j).schema.name) << ',';
  out << "provenance\n";
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      const auto& col = data.column(j);
      if (col.schema.kind == ColumnKind::Categorical) {
        out << csv_field(col.categories.at(static_cast<std::size_t>(col.values[i])));
      } else {
        out << col.values[i];
      }
      out << ',';
    }
    out << (synth.synthesized[i] ? "synthetic" : "root") << '\n';
  }
}

ExperimentConfig load_with_overrides(const std::string& config, const std::vector<std::string>& sets) {
  ExperimentConfig cfg = load_config(config);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1), fs::current_path());
  }
  cfg.warnings.clear();
  cfg.validate();
  for (const auto& w : cfg.warnings) std::clog << "[warn] " << w << '\n';
  return cfg;
}

int cmd_run(const std::string& config, const std::vector<std::string>& sets, const std::string& out_path) {
  const ExperimentConfig cfg = load_with_overrides(config, sets);
  const fs::path path = out_path.empty() ? results_dir() / (cfg.name + ".jsonl") : fs::path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto result = run_experiment(cfg, &out);
  const auto& last = result.rounds.back().eval;
  std::cout << "wrote " << path.string() << "\n"
            << "final ACC " << last.accuracy << "  AEOD " << (last.aeod ? std::to_string(*last.aeod) : "n/a")
            << "  ASPD " << (last.aspd ? std::to_string(*last.aspd) : "n/a") << '\n';
  if (!last.fairness_valid) std::cout << "ACC below task threshold " << last.threshold << '\n';
  return 0;
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& sets, const std::string& param,
              const std::string& values, std::size_t seeds, const std::string& out_dir) {
  const ExperimentConfig cfg = load_with_overrides(config, sets);
  const fs::path dir = out_dir.empty() ? results_dir() : fs::path(out_dir);
  const auto runs = sweep(cfg, param, split_list(values), seeds, dir);
  for (const auto& r : runs) std::cout << r.results.string() << '\n';
  return 0;
}

int cmd_summarize(const std::vector<std::string>& files, const std::string& group_by, bool csv) {
  std::vector<fs::path> paths(files.begin(), files.end());
  const auto keys = split_list(group_by);
  std::cout << format_summary(summarize(paths, keys), keys, csv);
  return 0;
}

int cmd_synth_export(const std::string& config, const std::vector<std::string>& sets, const std::string& out_path) {
  const ExperimentConfig cfg = load_with_overrides(config, sets);
  const Federation fed = prepare_federation(cfg, true);
  if (out_path.empty()) {
    write_dataset_csv(std::cout, *fed.synthetic);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    write_dataset_csv(out, *fed.synthetic);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated fairness/performance attack and defence simulator"};
  app.require_subcommand(1);

  std::string config, out, param, values, group_by = "aggregator,attack", out_dir;
  std::size_t seeds = 1;
  std::vector<std::string> files, sets;
  bool csv = false;

  auto* run = app.add_subcommand("run", "Run one experiment and stream JSON lines");
  run->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", sets, "Override a config key (key=value), repeatable");
  run->add_option("--out", out, "Output path (default: results dir / <name>.jsonl)");

  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep");
  sw->add_option("config", config, "Base config file")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", param, "Config key to vary")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();
  sw->add_option("--seeds", seeds, "Seeds per value")->check(CLI::PositiveNumber);
  sw->add_option("--out-dir", out_dir, "Output directory");
  sw->add_option("--set", sets, "Override a config key (key=value), repeatable");

  auto* sum = app.add_subcommand("summarize", "Aggregate final metrics across result files");
  sum->add_option("files", files, "Result files")->required()->check(CLI::ExistingFile);
  sum->add_option("--group-by", group_by, "Comma-separated config keys or tags");
  sum->add_flag("--csv", csv, "CSV output");

  auto* synth = app.add_subcommand("synth-export", "Write the root-plus-synthetic server set as CSV");
  synth->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out, "Output CSV (default: stdout)");
  synth->add_option("--set", sets, "Override a config key (key=value), repeatable");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, sets, out);
    if (*sw) return cmd_sweep(config, sets, param, values, seeds, out_dir);
    if (*sum) return cmd_summarize(files, group_by, csv);
    if (*synth) return cmd_synth_export(config, sets, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
