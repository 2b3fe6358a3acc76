#include "evorl/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <system_error>

#include "evorl/errors.hpp"

namespace evorl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Reads typed fields from one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigError(path_.empty() ? "config" : path_, "must be a JSON object");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string field(const std::string& key) const { return join(path_, key); }

  void read(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "must be a number");
    out = v.get<double>();
  }

  void read(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(field(key), "must be a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  void read_u64(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(field(key), "must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void read(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "must be true or false");
    out = v.get<bool>();
  }

  std::optional<std::string> read_string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "must be a string");
    return v.get<std::string>();
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void forbid(ObjectReader& reader, const std::string& key, ScenarioId id) {
  if (reader.has(key)) {
    throw ConfigError(key, "not valid for the " + to_string(id) + " scenario");
  }
}

void read_evolution(ObjectReader& top, EvolutionConfig& evo) {
  if (!top.has("evolution")) return;
  ObjectReader r(top.raw("evolution"), "evolution");
  r.read("population_size", evo.population_size);
  r.read("mutation_rate", evo.mutation_rate);
  r.read("locus_count", evo.locus_count);
  r.read("generations", evo.generations);
  if (auto mode = r.read_string("reproduction")) {
    if (*mode == "landscape") {
      evo.reproduction = ReproductionWeighting::Landscape;
    } else if (*mode == "uniform") {
      evo.reproduction = ReproductionWeighting::Uniform;
    } else {
      throw ConfigError("evolution.reproduction", "must be \"landscape\" or \"uniform\"");
    }
  }
  r.reject_unknown();
}

std::vector<ScheduleSpan> read_schedule(const json& doc) {
  if (!doc.is_array()) throw ConfigError("schedule", "must be an array of spans");
  std::vector<ScheduleSpan> spans;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    ObjectReader r(doc[i], "schedule[" + std::to_string(i) + "]");
    ScheduleSpan span;
    if (!r.has("start")) throw ConfigError(r.field("start"), "is required");
    if (!r.has("end")) throw ConfigError(r.field("end"), "is required");
    r.read("start", span.begin);
    r.read("end", span.end);
    if (auto drug = r.read_string("drug")) {
      if (*drug == "on") {
        span.drug_on = true;
      } else if (*drug == "off") {
        span.drug_on = false;
      } else {
        throw ConfigError(r.field("drug"), "must be \"on\" or \"off\"");
      }
    } else {
      throw ConfigError(r.field("drug"), "is required");
    }
    r.reject_unknown();
    spans.push_back(span);
  }
  return spans;
}

void read_antibiotic(ObjectReader& top, AntibioticParams& p) {
  if (!top.has("antibiotic")) return;
  ObjectReader r(top.raw("antibiotic"), "antibiotic");
  r.read("initial_frequency", p.initial_frequency);
  r.read("resistance_locus", p.resistance_locus);
  if (r.has("survival")) {
    ObjectReader s(r.raw("survival"), "antibiotic.survival");
    s.read("resistant_drug_on", p.resistant_drug_on);
    s.read("susceptible_drug_on", p.susceptible_drug_on);
    s.read("resistant_drug_off", p.resistant_drug_off);
    s.read("susceptible_drug_off", p.susceptible_drug_off);
    s.reject_unknown();
  }
  r.reject_unknown();
}

void read_mimicry(ObjectReader& top, MimicryParams& p) {
  if (!top.has("mimicry")) return;
  ObjectReader r(top.raw("mimicry"), "mimicry");
  if (auto target = r.read_string("target")) {
    try {
      p.target = Genotype::from_string(*target);
    } catch (const DomainError& e) {
      throw ConfigError("mimicry.target", e.what());
    }
  }
  if (auto initial = r.read_string("initial")) {
    if (*initial == "random") {
      p.initial = InitialPopulation::Random;
    } else if (*initial == "target") {
      p.initial = InitialPopulation::Target;
    } else {
      throw ConfigError("mimicry.initial", "must be \"random\" or \"target\"");
    }
  }
  r.read("survival_base", p.survival_base);
  r.read("survival_slope", p.survival_slope);
  r.reject_unknown();
}

StrategyKind opponent_from_string(const std::string& name) {
  for (const auto kind : {StrategyKind::AllC, StrategyKind::AllD, StrategyKind::TitForTat,
                          StrategyKind::Grim}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("cooperation.opponent", "must be all_c, all_d, tit_for_tat or grim");
}

void read_cooperation(ObjectReader& top, CooperationParams& p) {
  if (!top.has("cooperation")) return;
  ObjectReader r(top.raw("cooperation"), "cooperation");
  r.read("episodes", p.episodes);
  r.read("rounds", p.rounds);
  r.read("warmup_episodes", p.warmup_episodes);
  r.read("warmup_epsilon", p.warmup_epsilon);
  if (auto opponent = r.read_string("opponent")) p.opponent = opponent_from_string(*opponent);
  if (r.has("matrix")) {
    ObjectReader m(r.raw("matrix"), "cooperation.matrix");
    double t = p.matrix.temptation();
    double rew = p.matrix.reward();
    double pun = p.matrix.punishment();
    double s = p.matrix.sucker();
    m.read("T", t);
    m.read("R", rew);
    m.read("P", pun);
    m.read("S", s);
    m.reject_unknown();
    p.matrix = GameMatrix(t, rew, pun, s);
  }
  r.reject_unknown();
}

void read_learning(ObjectReader& top, LearningParams& p) {
  if (!top.has("learning")) return;
  ObjectReader r(top.raw("learning"), "learning");
  r.read("alpha", p.alpha);
  r.read("gamma", p.gamma);
  r.read("epsilon", p.epsilon);
  r.reject_unknown();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// `opened` is called once the file exists on disk, so callers know what to clean up.
void write_file(const fs::path& path, const std::string& contents,
                const std::function<void()>& opened = {}) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (opened) opened();
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace

ScenarioConfig parse_config_json(const json& doc) {
  ObjectReader top(doc, "");
  const auto scenario_name = top.read_string("scenario");
  if (!scenario_name) throw ConfigError("scenario", "is required");
  ScenarioConfig cfg = ScenarioConfig::defaults(scenario_from_string(*scenario_name));

  top.read_u64("seed", cfg.seed);
  top.read("replicates", cfg.replicates);

  switch (cfg.scenario) {
    case ScenarioId::Antibiotic: {
      forbid(top, "mimicry", cfg.scenario);
      forbid(top, "cooperation", cfg.scenario);
      forbid(top, "learning", cfg.scenario);
      read_evolution(top, cfg.evolution);
      read_antibiotic(top, cfg.antibiotic);
      if (top.has("schedule")) {
        cfg.schedule = read_schedule(top.raw("schedule"));
      } else {
        cfg.schedule = {{0, cfg.evolution.generations, true}};
      }
      break;
    }
    case ScenarioId::Mimicry: {
      forbid(top, "antibiotic", cfg.scenario);
      forbid(top, "cooperation", cfg.scenario);
      forbid(top, "learning", cfg.scenario);
      forbid(top, "schedule", cfg.scenario);
      cfg.mimicry.target = Genotype();
      read_evolution(top, cfg.evolution);
      read_mimicry(top, cfg.mimicry);
      cfg.mimicry.target = mimicry_target(cfg);
      break;
    }
    case ScenarioId::Cooperation: {
      forbid(top, "antibiotic", cfg.scenario);
      forbid(top, "mimicry", cfg.scenario);
      forbid(top, "evolution", cfg.scenario);
      forbid(top, "schedule", cfg.scenario);
      read_learning(top, cfg.learning);
      read_cooperation(top, cfg.cooperation);
      break;
    }
  }
  top.reject_unknown();
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", "malformed JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config_json(doc);
}

json config_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["scenario"] = to_string(cfg.scenario);
  doc["seed"] = cfg.seed;
  doc["replicates"] = cfg.replicates;
  if (cfg.scenario != ScenarioId::Cooperation) {
    doc["evolution"] = {
        {"population_size", cfg.evolution.population_size},
        {"mutation_rate", cfg.evolution.mutation_rate},
        {"locus_count", cfg.evolution.locus_count},
        {"generations", cfg.evolution.generations},
        {"reproduction", cfg.evolution.reproduction == ReproductionWeighting::Landscape
                             ? "landscape"
                             : "uniform"},
    };
  }
  switch (cfg.scenario) {
    case ScenarioId::Antibiotic: {
      const auto& a = cfg.antibiotic;
      doc["antibiotic"] = {
          {"initial_frequency", a.initial_frequency},
          {"resistance_locus", a.resistance_locus},
          {"survival",
           {{"resistant_drug_on", a.resistant_drug_on},
            {"susceptible_drug_on", a.susceptible_drug_on},
            {"resistant_drug_off", a.resistant_drug_off},
            {"susceptible_drug_off", a.susceptible_drug_off}}},
      };
      json spans = json::array();
      for (const auto& s : cfg.schedule) {
        spans.push_back({{"start", s.begin}, {"end", s.end}, {"drug", s.drug_on ? "on" : "off"}});
      }
      doc["schedule"] = spans;
      break;
    }
    case ScenarioId::Mimicry:
      doc["mimicry"] = {
          {"target", mimicry_target(cfg).to_string()},
          {"initial", cfg.mimicry.initial == InitialPopulation::Random ? "random" : "target"},
          {"survival_base", cfg.mimicry.survival_base},
          {"survival_slope", cfg.mimicry.survival_slope},
      };
      break;
    case ScenarioId::Cooperation: {
      const auto& c = cfg.cooperation;
      doc["learning"] = {{"alpha", cfg.learning.alpha},
                         {"gamma", cfg.learning.gamma},
                         {"epsilon", cfg.learning.epsilon}};
      doc["cooperation"] = {
          {"episodes", c.episodes},
          {"rounds", c.rounds},
          {"warmup_episodes", c.warmup_episodes},
          {"warmup_epsilon", c.warmup_epsilon},
          {"opponent", to_string(c.opponent)},
          {"matrix",
           {{"T", c.matrix.temptation()},
            {"R", c.matrix.reward()},
            {"P", c.matrix.punishment()},
            {"S", c.matrix.sucker()}}},
      };
      break;
    }
  }
  return doc;
}

SummaryTable summarize(const TrajectorySet& trajectories) {
  if (trajectories.replicates.empty()) throw DomainError("summarize: empty trajectory set");
  const std::size_t width = trajectories.observables.size();
  const std::size_t steps = trajectories.replicates.front().rows.size();
  for (const auto& rep : trajectories.replicates) {
    if (rep.rows.size() != steps) {
      throw DomainError("summarize: replicate " + std::to_string(rep.replicate) + " has " +
                        std::to_string(rep.rows.size()) + " steps, expected " +
                        std::to_string(steps));
    }
    for (const auto& row : rep.rows) {
      if (row.size() != width) throw DomainError("summarize: ragged observable row");
    }
  }

  SummaryTable table;
  table.step_label = trajectories.step_label;
  table.observables = trajectories.observables;
  table.replicates = trajectories.replicates.size();
  table.standard_error_defined = table.replicates > 1;
  table.rows.reserve(steps);
  std::vector<double> column(table.replicates);
  for (std::size_t step = 0; step < steps; ++step) {
    SummaryRow row;
    row.step = step;
    for (std::size_t j = 0; j < width; ++j) {
      for (std::size_t k = 0; k < table.replicates; ++k) {
        column[k] = trajectories.replicates[k].rows[step][j];
      }
      const FitnessEstimate est = mean_and_standard_error(column);
      row.mean.push_back(est.mean);
      row.standard_error.push_back(est.standard_error);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string trajectories_csv(const TrajectorySet& trajectories) {
  std::ostringstream out;
  out << "replicate," << trajectories.step_label;
  for (const auto& name : trajectories.observables) out << ',' << name;
  out << '\n';
  for (const auto& rep : trajectories.replicates) {
    for (std::size_t step = 0; step < rep.rows.size(); ++step) {
      out << rep.replicate << ',' << step;
      for (const double v : rep.rows[step]) out << ',' << format_number(v);
      out << '\n';
    }
  }
  return out.str();
}

std::string summary_csv(const SummaryTable& summary) {
  std::ostringstream out;
  out << summary.step_label << ",replicates";
  for (const auto& name : summary.observables) out << ',' << name << "_mean," << name << "_se";
  out << ",se_defined\n";
  for (const auto& row : summary.rows) {
    out << row.step << ',' << summary.replicates;
    for (std::size_t j = 0; j < row.mean.size(); ++j) {
      out << ',' << format_number(row.mean[j]) << ',' << format_number(row.standard_error[j]);
    }
    out << ',' << (summary.standard_error_defined ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string policies_csv(const TrajectorySet& trajectories) {
  static constexpr const char* kStateNames[] = {"start", "CC", "CD", "DC", "DD"};
  std::ostringstream out;
  out << "replicate,state,greedy_move\n";
  for (const auto& rep : trajectories.replicates) {
    if (!rep.greedy_policy) continue;
    const Memory1Policy& p = *rep.greedy_policy;
    out << rep.replicate << ',' << kStateNames[0] << ',' << to_char(p.first) << '\n';
    for (std::size_t i = 0; i < 4; ++i) {
      out << rep.replicate << ',' << kStateNames[i + 1] << ',' << to_char(p.reply[i]) << '\n';
    }
  }
  return out.str();
}

json RunManifest::to_json() const {
  json doc;
  doc["config"] = config_to_json(config);
  doc["seed"] = config.seed;
  doc["version"] = version;
  doc["started_at"] = started_at;
  doc["finished_at"] = finished_at ? json(*finished_at) : json(nullptr);
  doc["outputs"] = outputs;
  doc["status"] = status;
  if (error) doc["error"] = *error;
  if (!cleaned_up.empty()) doc["cleaned_up"] = cleaned_up;
  json ext = json::array();
  for (const auto& [replicate, generation] : extinctions) {
    ext.push_back({{"replicate", replicate}, {"generation", generation}});
  }
  doc["extinctions"] = ext;
  return doc;
}

RunManifest run(const ScenarioConfig& cfg, const fs::path& out_dir, const RunOptions& options) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  RunManifest manifest;
  manifest.config = cfg;
  manifest.started_at = utc_timestamp();
  const fs::path manifest_path = out_dir / "manifest.json";
  write_file(manifest_path, manifest.to_json().dump(2) + "\n");

  std::vector<fs::path> written;
  try {
    const TrajectorySet trajectories = run_scenario(cfg, options.threads);
    for (const auto& rep : trajectories.replicates) {
      if (rep.extinct_at) manifest.extinctions.emplace_back(rep.replicate, *rep.extinct_at);
    }
    const SummaryTable summary = summarize(trajectories);

    auto emit = [&](const std::string& name, const std::string& contents) {
      const fs::path path = out_dir / name;
      write_file(path, contents, [&] { written.push_back(path); });
      manifest.outputs[name.substr(0, name.find('.'))] = path.string();
    };
    emit("trajectories.csv", trajectories_csv(trajectories));
    emit("summary.csv", summary_csv(summary));
    if (cfg.scenario == ScenarioId::Cooperation) emit("policies.csv", policies_csv(trajectories));
  } catch (const std::exception& e) {
    for (const auto& path : written) {
      if (fs::remove(path, ec)) manifest.cleaned_up.push_back(path.string());
    }
    manifest.outputs.clear();
    manifest.status = "failed";
    manifest.error = e.what();
    manifest.finished_at = utc_timestamp();
    try {
      write_file(manifest_path, manifest.to_json().dump(2) + "\n");
    } catch (...) {
      // The original failure is the one worth reporting.
    }
    throw;
  }

  manifest.status = "completed";
  manifest.finished_at = utc_timestamp();
  write_file(manifest_path, manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace evorl
