#include "evorl/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "evorl/errors.hpp"

namespace evorl {

namespace {

constexpr const char* kDrugOn = "drug_on";
constexpr const char* kDrugOff = "drug_off";

void check_probability(double v, const std::string& field) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ConfigError(field, "must lie in [0, 1]");
}

// Runs fn(0..n-1) on up to `threads` workers. The first exception is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

TrajectorySet run_replicates(
    const ScenarioConfig& cfg, const RandomStreamTree& streams, unsigned threads,
    std::string step_label, std::vector<std::string> observables,
    ReplicateTrajectory (*run_one)(const ScenarioConfig&, std::size_t, RandomStream&)) {
  cfg.validate();
  TrajectorySet set{std::move(step_label), std::move(observables), {}};
  set.replicates.resize(cfg.replicates);
  parallel_for(cfg.replicates, threads, [&](std::size_t k) {
    RandomStream rng = streams.stream("replicate", k);
    set.replicates[k] = run_one(cfg, k, rng);
  });
  return set;
}

Population initial_antibiotic_population(const ScenarioConfig& cfg) {
  const std::size_t n = cfg.evolution.population_size;
  const auto resistant =
      static_cast<std::size_t>(std::llround(cfg.antibiotic.initial_frequency * static_cast<double>(n)));
  std::vector<Genotype> genotypes(n, Genotype(cfg.evolution.locus_count));
  for (std::size_t i = 0; i < resistant; ++i) {
    genotypes[i].set(cfg.antibiotic.resistance_locus, 1);
  }
  return Population::from_genotypes(genotypes);
}

// Runs G generations, recording observe(pop, generation) for generations 0..G.
// After extinction the remaining rows are zero-filled.
template <typename Observe, typename LandscapeAt>
ReplicateTrajectory evolve(const ScenarioConfig& cfg, std::size_t replicate, Population pop,
                           LandscapeAt landscape_at, Observe observe, std::size_t width,
                           RandomStream& rng) {
  ReplicateTrajectory traj;
  traj.replicate = replicate;
  const std::size_t generations = cfg.evolution.generations;
  traj.rows.reserve(generations + 1);
  traj.rows.push_back(observe(pop, 0));
  for (std::size_t g = 0; g < generations; ++g) {
    if (traj.extinct_at) {
      traj.rows.emplace_back(width, 0.0);
      continue;
    }
    GenerationStep step = step_generation(pop, landscape_at(g), cfg.evolution, rng);
    if (step.extinct()) {
      traj.extinct_at = step.extinct_at;
      traj.rows.emplace_back(width, 0.0);
      continue;
    }
    pop = std::move(step.offspring);
    traj.rows.push_back(observe(pop, g + 1));
  }
  return traj;
}

}  // namespace

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::Antibiotic: return "antibiotic";
    case ScenarioId::Mimicry: return "mimicry";
    case ScenarioId::Cooperation: return "cooperation";
  }
  return "unknown";
}

ScenarioId scenario_from_string(const std::string& name) {
  if (name == "antibiotic") return ScenarioId::Antibiotic;
  if (name == "mimicry") return ScenarioId::Mimicry;
  if (name == "cooperation") return ScenarioId::Cooperation;
  throw ConfigError("scenario", "unknown scenario '" + name +
                                    "' (expected antibiotic, mimicry or cooperation)");
}

ScenarioConfig ScenarioConfig::defaults(ScenarioId id) {
  ScenarioConfig cfg;
  cfg.scenario = id;
  switch (id) {
    case ScenarioId::Antibiotic:
      cfg.evolution = {500, 0.0, 1, 40, ReproductionWeighting::Landscape};
      cfg.schedule = {{0, cfg.evolution.generations, true}};
      break;
    case ScenarioId::Mimicry:
      cfg.evolution = {500, 0.005, 20, 60, ReproductionWeighting::Landscape};
      cfg.mimicry.target = mimicry_target(cfg);
      break;
    case ScenarioId::Cooperation:
      cfg.learning = {0.2, 0.9, 0.2};
      break;
  }
  return cfg;
}

void ScenarioConfig::validate() const {
  if (replicates < 1) throw ConfigError("replicates", "must be >= 1");
  switch (scenario) {
    case ScenarioId::Antibiotic: {
      evolution.validate();
      check_probability(antibiotic.initial_frequency, "antibiotic.initial_frequency");
      if (antibiotic.resistance_locus >= evolution.locus_count) {
        throw ConfigError("antibiotic.resistance_locus", "must be < evolution.locus_count");
      }
      check_probability(antibiotic.resistant_drug_on, "antibiotic.survival.resistant_drug_on");
      check_probability(antibiotic.susceptible_drug_on, "antibiotic.survival.susceptible_drug_on");
      check_probability(antibiotic.resistant_drug_off, "antibiotic.survival.resistant_drug_off");
      check_probability(antibiotic.susceptible_drug_off,
                        "antibiotic.survival.susceptible_drug_off");
      if (schedule.empty()) throw ConfigError("schedule", "must contain at least one span");
      std::size_t expected_begin = 0;
      for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto& span = schedule[i];
        const std::string name = "schedule[" + std::to_string(i) + "]";
        if (span.end <= span.begin) {
          throw ConfigError(name, "span [" + std::to_string(span.begin) + ", " +
                                      std::to_string(span.end) + ") is empty");
        }
        if (span.begin < expected_begin) {
          throw ConfigError(name, "span [" + std::to_string(span.begin) + ", " +
                                      std::to_string(span.end) + ") overlaps schedule[" +
                                      std::to_string(i - 1) + "]");
        }
        if (span.begin > expected_begin) {
          throw ConfigError(name, "gap before span [" + std::to_string(span.begin) + ", " +
                                      std::to_string(span.end) + "); spans must be contiguous");
        }
        expected_begin = span.end;
      }
      if (expected_begin != evolution.generations) {
        throw ConfigError("schedule", "spans cover [0, " + std::to_string(expected_begin) +
                                          ") but generations is " +
                                          std::to_string(evolution.generations));
      }
      break;
    }
    case ScenarioId::Mimicry: {
      evolution.validate();
      if (mimicry.target.size() != evolution.locus_count) {
        throw ConfigError("mimicry.target", "length " + std::to_string(mimicry.target.size()) +
                                                " differs from evolution.locus_count " +
                                                std::to_string(evolution.locus_count));
      }
      check_probability(mimicry.survival_base, "mimicry.survival_base");
      if (!std::isfinite(mimicry.survival_slope)) {
        throw ConfigError("mimicry.survival_slope", "must be finite");
      }
      // Survival is linear in similarity, so checking both ends suffices.
      check_probability(mimicry.survival_base + mimicry.survival_slope, "mimicry.survival_slope");
      if (!schedule.empty()) throw ConfigError("schedule", "only valid for the antibiotic scenario");
      break;
    }
    case ScenarioId::Cooperation: {
      learning.validate();
      if (cooperation.episodes < 1) throw ConfigError("cooperation.episodes", "must be >= 1");
      if (cooperation.rounds < 1) throw ConfigError("cooperation.rounds", "must be >= 1");
      check_probability(cooperation.warmup_epsilon, "cooperation.warmup_epsilon");
      if (cooperation.opponent == StrategyKind::QLearner ||
          cooperation.opponent == StrategyKind::Memory1) {
        throw ConfigError("cooperation.opponent", "must be all_c, all_d, tit_for_tat or grim");
      }
      // Re-run the matrix invariants for configs assembled field by field.
      GameMatrix(cooperation.matrix.temptation(), cooperation.matrix.reward(),
                 cooperation.matrix.punishment(), cooperation.matrix.sucker());
      if (!schedule.empty()) throw ConfigError("schedule", "only valid for the antibiotic scenario");
      break;
    }
  }
}

std::string antibiotic_environment(const std::vector<ScheduleSpan>& schedule,
                                   std::size_t generation) {
  for (const auto& span : schedule) {
    if (generation >= span.begin && generation < span.end) return span.drug_on ? kDrugOn : kDrugOff;
  }
  if (!schedule.empty() && generation >= schedule.back().end) {
    return schedule.back().drug_on ? kDrugOn : kDrugOff;
  }
  throw DomainError("no schedule span covers generation " + std::to_string(generation));
}

FitnessLandscape antibiotic_landscape(const AntibioticParams& params) {
  return FitnessLandscape::environment_dependent(
      [params](const Genotype& g, std::string_view env) {
        const bool resistant = g.at(params.resistance_locus) == 1;
        if (env == kDrugOn) return resistant ? params.resistant_drug_on : params.susceptible_drug_on;
        return resistant ? params.resistant_drug_off : params.susceptible_drug_off;
      },
      kDrugOn);
}

Genotype mimicry_target(const ScenarioConfig& cfg) {
  if (cfg.mimicry.target.size() != 0) return cfg.mimicry.target;
  Genotype target(cfg.evolution.locus_count);
  for (std::size_t i = 0; i < target.size(); i += 2) target.set(i, 1);
  return target;
}

double similarity(const Genotype& g, const Genotype& target) {
  if (g.size() != target.size() || g.size() == 0) {
    throw DomainError("similarity: genotype and target lengths differ");
  }
  std::size_t matches = 0;
  for (std::size_t i = 0; i < g.size(); ++i) matches += g[i] == target[i] ? 1 : 0;
  return static_cast<double>(matches) / static_cast<double>(g.size());
}

FitnessLandscape mimicry_landscape(const MimicryParams& params, Genotype target) {
  return FitnessLandscape::deterministic(
      [params, target = std::move(target)](const Genotype& g) {
        return params.survival_base + params.survival_slope * similarity(g, target);
      });
}

ReplicateTrajectory run_antibiotic_replicate(const ScenarioConfig& cfg, std::size_t replicate,
                                             RandomStream& rng) {
  const FitnessLandscape base = antibiotic_landscape(cfg.antibiotic);
  const std::size_t last = cfg.evolution.generations - 1;
  auto landscape_at = [&](std::size_t g) {
    return base.with_environment(antibiotic_environment(cfg.schedule, g));
  };
  auto observe = [&](const Population& pop, std::size_t g) {
    return std::vector<double>{allele_frequency(pop, cfg.antibiotic.resistance_locus),
                               mean_landscape_value(pop, landscape_at(std::min(g, last)))};
  };
  return evolve(cfg, replicate, initial_antibiotic_population(cfg), landscape_at, observe, 2, rng);
}

ReplicateTrajectory run_mimicry_replicate(const ScenarioConfig& cfg, std::size_t replicate,
                                          RandomStream& rng) {
  const Genotype target = mimicry_target(cfg);
  const FitnessLandscape land = mimicry_landscape(cfg.mimicry, target);
  const std::size_t n = cfg.evolution.population_size;

  std::vector<Genotype> genotypes;
  genotypes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (cfg.mimicry.initial == InitialPopulation::Target) {
      genotypes.push_back(target);
      continue;
    }
    Genotype g(cfg.evolution.locus_count);
    for (std::size_t locus = 0; locus < g.size(); ++locus) {
      if (rng.bernoulli(0.5)) g.set(locus, 1);
    }
    genotypes.push_back(std::move(g));
  }

  auto observe = [&](const Population& pop, std::size_t) {
    std::vector<double> sims;
    sims.reserve(pop.size());
    for (const auto& m : pop.members()) sims.push_back(similarity(m.genotype, target));
    return std::vector<double>{compensated_sum(sims) / static_cast<double>(pop.size()),
                               mean_landscape_value(pop, land)};
  };
  return evolve(cfg, replicate, Population::from_genotypes(genotypes),
                [&](std::size_t) -> const FitnessLandscape& { return land; }, observe, 2, rng);
}

ReplicateTrajectory run_cooperation_replicate(const ScenarioConfig& cfg, std::size_t replicate,
                                              RandomStream& rng) {
  const CooperationParams& coop = cfg.cooperation;
  LearningParams params = cfg.learning;
  params.epsilon = coop.warmup_episodes > 0 ? coop.warmup_epsilon : cfg.learning.epsilon;
  Strategy learner = Strategy::q_learner(params);
  Strategy opponent = [&] {
    switch (coop.opponent) {
      case StrategyKind::AllC: return Strategy::all_cooperate();
      case StrategyKind::AllD: return Strategy::all_defect();
      case StrategyKind::Grim: return Strategy::grim();
      default: return Strategy::tit_for_tat();
    }
  }();

  ReplicateTrajectory traj;
  traj.replicate = replicate;
  const std::size_t total = coop.warmup_episodes + coop.episodes;
  traj.rows.reserve(total);
  for (std::size_t episode = 0; episode < total; ++episode) {
    if (episode == coop.warmup_episodes) learner.learning_params().epsilon = cfg.learning.epsilon;
    const MatchResult match = play_match(learner, opponent, coop.rounds, coop.matrix, rng);
    const auto cooperated = std::count_if(match.moves.begin(), match.moves.end(), [](const auto& m) {
      return m.first == Move::Cooperate;
    });
    traj.rows.push_back({static_cast<double>(cooperated) / static_cast<double>(match.rounds),
                         match.score_a});
  }
  traj.greedy_policy = learner.greedy_policy();
  return traj;
}

TrajectorySet run_antibiotic(const ScenarioConfig& cfg, const RandomStreamTree& streams,
                             unsigned threads) {
  if (cfg.scenario != ScenarioId::Antibiotic) throw ConfigError("scenario", "expected antibiotic");
  return run_replicates(cfg, streams, threads, "generation", {"allele_freq", "mean_survival"},
                        &run_antibiotic_replicate);
}

TrajectorySet run_mimicry(const ScenarioConfig& cfg, const RandomStreamTree& streams,
                          unsigned threads) {
  if (cfg.scenario != ScenarioId::Mimicry) throw ConfigError("scenario", "expected mimicry");
  return run_replicates(cfg, streams, threads, "generation", {"mean_similarity", "mean_survival"},
                        &run_mimicry_replicate);
}

TrajectorySet run_cooperation(const ScenarioConfig& cfg, const RandomStreamTree& streams,
                              unsigned threads) {
  if (cfg.scenario != ScenarioId::Cooperation) throw ConfigError("scenario", "expected cooperation");
  return run_replicates(cfg, streams, threads, "episode", {"cooperation_rate", "episode_return"},
                        &run_cooperation_replicate);
}

TrajectorySet run_scenario(const ScenarioConfig& cfg, unsigned threads) {
  const RandomStreamTree streams(cfg.seed);
  switch (cfg.scenario) {
    case ScenarioId::Antibiotic: return run_antibiotic(cfg, streams, threads);
    case ScenarioId::Mimicry: return run_mimicry(cfg, streams, threads);
    case ScenarioId::Cooperation: return run_cooperation(cfg, streams, threads);
  }
  throw ConfigError("scenario", "unknown scenario");
}

}  // namespace evorl
