#ifndef GUARDFED_RESULTS_HPP
#define GUARDFED_RESULTS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "guardfed/experiment.hpp"

namespace guardfed {

// Results stream: one JSON object per line.
//   {"type":"header","schema_version":1,"config":{...},"setup":{...}}
//   {"type":"round","round":t,"eval":{...},"sampled":[...],"attacks":[...],"skipped":false}
//   {"type":"trust","round":t,"client":n,"fair":..,"dev":..,"trust":..,"selected":..}
//   {"type":"summary","rounds":T,"final":{...}}
inline constexpr int kResultsSchemaVersion = 1;

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const EvalReport& report);

void write_header(std::ostream& out, const ExperimentConfig& cfg, const Federation& fed,
                  const RunTags& tags = {});
void write_round(std::ostream& out, const RoundRecord& record);
void write_summary(std::ostream& out, const std::vector<RoundRecord>& rounds);

/// Directory for result files: $GUARDFED_RESULTS_DIR, else ./results.
std::filesystem::path results_dir();

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample std; 0 for a single run
  std::size_t n = 0;
};

struct SummaryRow {
  std::vector<std::string> key;
  std::size_t runs = 0;
  Stat acc, aeod, aspd;
  double threshold = 0.0;
  bool fairness_valid = false;  // mean final accuracy >= threshold
};

/// Final-round ACC/AEOD/ASPD per group. Group keys name config fields
/// (e.g. aggregator, attack, alpha) or header tags (e.g. sweep_value).
std::vector<SummaryRow> summarize(const std::vector<std::filesystem::path>& files,
                                  const std::vector<std::string>& group_by);

std::string format_summary(const std::vector<SummaryRow>& rows, const std::vector<std::string>& group_by,
                           bool csv);

}  // namespace guardfed

#endif  // GUARDFED_RESULTS_HPP
