#include "guardfed/results.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace guardfed {

using nlohmann::json;

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["dataset"] = cfg.dataset.string();
  j["pool_size"] = cfg.pool_size;
  j["clients_per_round"] = cfg.clients_per_round;
  j["rounds"] = cfg.rounds;
  j["alpha"] = cfg.alpha;
  j["attacker_fraction"] = cfg.attacker_fraction;
  j["attacker_placement"] = cfg.exact_attackers_per_round ? "exact_per_round" : "pool";
  j["attack"] = std::string(to_string(cfg.adversary.kind));
  j["noise_sigma"] = cfg.adversary.sigma;
  j["foe_lambda"] = cfg.adversary.foe_lambda;
  j["sp_split"] = cfg.adversary.split_ratio;
  j["dfa_perf"] = std::string(to_string(cfg.adversary.dfa_perf));
  j["aggregator"] = std::string(to_string(cfg.aggregator));
  j["tau"] = cfg.tau;
  j["gamma"] = cfg.gamma;
  j["global_lr"] = cfg.global_lr;
  j["hidden"] = cfg.hidden;
  j["local_epochs"] = cfg.train.epochs;
  j["batch_size"] = cfg.train.batch_size;
  j["local_lr"] = cfg.train.learning_rate;
  const TrainConfig ref = cfg.reference_train();
  j["reference_epochs"] = ref.epochs;
  j["reference_batch_size"] = ref.batch_size;
  j["reference_lr"] = ref.learning_rate;
  j["include_sensitive_feature"] = cfg.include_sensitive_feature;
  j["test_fraction"] = cfg.test_fraction;
  j["root_fraction"] = cfg.root_fraction;
  j["synth_fraction"] = cfg.synth_fraction;
  j["server_fraction"] = cfg.root_fraction + cfg.synth_fraction;
  if (cfg.task_threshold) j["task_threshold"] = *cfg.task_threshold;
  j["seed"] = cfg.seed;
  return j;
}

json to_json(const EvalReport& report) {
  json j;
  j["accuracy"] = report.accuracy;
  j["aspd"] = report.aspd ? json(*report.aspd) : json(nullptr);
  j["aeod"] = report.aeod ? json(*report.aeod) : json(nullptr);
  j["fairness_valid"] = report.fairness_valid;
  j["threshold"] = report.threshold;
  if (!report.undefined_reason.empty()) j["undefined_reason"] = report.undefined_reason;
  return j;
}

namespace {

void emit(std::ostream& out, const json& j) {
  out << j.dump() << '\n';
  out.flush();
}

}  // namespace

void write_header(std::ostream& out, const ExperimentConfig& cfg, const Federation& fed, const RunTags& tags) {
  json setup;
  setup["rows"] = fed.raw.rows();
  setup["dropped_rows"] = fed.raw.dropped_rows();
  setup["train_rows"] = fed.train_rows.size();
  setup["test_rows"] = fed.test_rows.size();
  setup["root_rows"] = fed.root_rows.size();
  setup["synthetic_rows"] = fed.synthetic ? fed.synthetic->data.rows() : 0;
  setup["feature_width"] = fed.encoder.width();
  setup["malicious"] = fed.malicious;
  json roles = json::object();
  for (const auto& [client, role] : fed.roles) roles[std::to_string(client)] = std::string(to_string(role));
  setup["roles"] = roles;
  setup["task_threshold"] = fed.task_threshold;
  std::vector<std::size_t> sizes;
  for (const auto& p : fed.partitions) sizes.push_back(p.size());
  setup["partition_sizes"] = sizes;
  setup["encoder_warnings"] = fed.encoder.warnings();

  json header;
  header["type"] = "header";
  header["schema_version"] = kResultsSchemaVersion;
  header["config"] = to_json(cfg);
  header["setup"] = setup;
  json tag_obj = json::object();
  for (const auto& [k, v] : tags) tag_obj[k] = v;
  header["tags"] = tag_obj;
  header["warnings"] = cfg.warnings;
  emit(out, header);
}

void write_round(std::ostream& out, const RoundRecord& record) {
  json j;
  j["type"] = "round";
  j["round"] = record.round;
  j["eval"] = to_json(record.eval);
  j["sampled"] = record.sampled;
  json attacks = json::array();
  for (const auto& a : record.attacks) {
    attacks.push_back({{"client", a.client}, {"role", std::string(to_string(a.role))}, {"norm", a.update_norm}});
  }
  j["attacks"] = attacks;
  j["skipped"] = record.skipped;
  if (record.trust) {
    j["selected"] = record.trust->selected_count();
    j["reference_fair"] = record.trust->reference_fair;
  }
  if (record.duration_ms) j["duration_ms"] = *record.duration_ms;
  emit(out, j);
  if (!record.trust) return;
  for (const auto& c : record.trust->clients) {
    json t;
    t["type"] = "trust";
    t["round"] = record.round;
    t["client"] = c.client;
    t["fair"] = c.fair;
    t["dev"] = c.dev;
    t["trust"] = c.trust;
    t["selected"] = c.selected;
    if (c.fair_undefined) t["fair_undefined"] = true;
    emit(out, t);
  }
}

void write_summary(std::ostream& out, const std::vector<RoundRecord>& rounds) {
  json j;
  j["type"] = "summary";
  j["rounds"] = rounds.size();
  std::size_t skipped = 0;
  for (const auto& r : rounds) skipped += r.skipped ? 1 : 0;
  j["skipped_rounds"] = skipped;
  if (!rounds.empty()) j["final"] = to_json(rounds.back().eval);
  emit(out, j);
}

std::filesystem::path results_dir() {
  if (const char* env = std::getenv("GUARDFED_RESULTS_DIR"); env && *env) return env;
  return "results";
}

namespace {

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::string key_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

struct RunFinal {
  std::vector<std::string> key;
  double acc = 0.0;
  std::optional<double> aeod, aspd;
  double threshold = 0.0;
};

RunFinal read_run(const std::filesystem::path& file, const std::vector<std::string>& group_by) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::string line;
  std::optional<json> header;
  std::optional<json> last_eval;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      const int version = j.value("schema_version", -1);
      if (version != kResultsSchemaVersion) {
        throw std::runtime_error(file.string() + ": schema_version " + std::to_string(version) + ", expected " +
                                 std::to_string(kResultsSchemaVersion));
      }
      header = j;
    } else if (type == "round") {
      last_eval = j.at("eval");
    }
  }
  if (!header) throw std::runtime_error(file.string() + ": missing header");
  if (!last_eval) throw std::runtime_error(file.string() + ": no rounds recorded");

  RunFinal run;
  for (const auto& g : group_by) {
    const json& tags = (*header)["tags"];
    const json& cfg = (*header)["config"];
    if (tags.contains(g)) {
      run.key.push_back(key_text(tags[g]));
    } else if (cfg.contains(g)) {
      run.key.push_back(key_text(cfg[g]));
    } else {
      throw std::runtime_error(file.string() + ": unknown group key '" + g + "'");
    }
  }
  run.acc = last_eval->at("accuracy").get<double>();
  if (!(*last_eval)["aeod"].is_null()) run.aeod = (*last_eval)["aeod"].get<double>();
  if (!(*last_eval)["aspd"].is_null()) run.aspd = (*last_eval)["aspd"].get<double>();
  run.threshold = last_eval->at("threshold").get<double>();
  return run;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<std::filesystem::path>& files,
                                  const std::vector<std::string>& group_by) {
  std::map<std::vector<std::string>, std::vector<RunFinal>> groups;
  for (const auto& f : files) {
    RunFinal run = read_run(f, group_by);
    groups[run.key].push_back(std::move(run));
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, runs] : groups) {
    std::vector<double> acc, aeod, aspd;
    for (const auto& r : runs) {
      acc.push_back(r.acc);
      if (r.aeod) aeod.push_back(*r.aeod);
      if (r.aspd) aspd.push_back(*r.aspd);
    }
    SummaryRow row;
    row.key = key;
    row.runs = runs.size();
    row.acc = stat_of(acc);
    row.aeod = stat_of(aeod);
    row.aspd = stat_of(aspd);
    row.threshold = runs.front().threshold;
    row.fairness_valid = row.acc.mean >= row.threshold;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_summary(const std::vector<SummaryRow>& rows, const std::vector<std::string>& group_by,
                           bool csv) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  auto stat = [&](const Stat& s) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(4);
    if (s.n == 0) {
      cell << (csv ? "," : "n/a");
    } else if (csv) {
      cell << s.mean << ',' << s.std;
    } else {
      cell << s.mean << " ± " << s.std;
    }
    return cell.str();
  };
  if (csv) {
    for (const auto& g : group_by) out << g << ',';
    out << "runs,acc_mean,acc_std,aeod_mean,aeod_std,aspd_mean,aspd_std,threshold,fairness_valid\n";
    for (const auto& r : rows) {
      for (const auto& k : r.key) out << k << ',';
      out << r.runs << ',' << stat(r.acc) << ',' << stat(r.aeod) << ',' << stat(r.aspd) << ',' << r.threshold
          << ',' << (r.fairness_valid ? "true" : "false") << '\n';
    }
    return out.str();
  }
  for (const auto& g : group_by) out << std::left << std::setw(14) << g << ' ';
  out << std::left << std::setw(5) << "runs" << ' ' << std::setw(18) << "ACC" << ' ' << std::setw(18) << "AEOD" << ' '
      << std::setw(18) << "ASPD" << " note\n";
  for (const auto& r : rows) {
    for (const auto& k : r.key) out << std::left << std::setw(14) << k << ' ';
    out << std::left << std::setw(5) << r.runs << ' ' << std::setw(18) << stat(r.acc) << ' ' << std::setw(18)
        << stat(r.aeod) << ' ' << std::setw(18) << stat(r.aspd) << ' ';
    if (!r.fairness_valid) out << "ACC below threshold " << r.threshold << "; fairness not meaningful";
    out << '\n';
  }
  return out.str();
}

}  // namespace guardfed
