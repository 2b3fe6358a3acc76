#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evorl/core.hpp"
#include "evorl/dynamics.hpp"
#include "evorl/games.hpp"
#include "evorl/random.hpp"
#include "evorl/rl.hpp"

namespace evorl {

enum class ScenarioId { Antibiotic, Mimicry, Cooperation };

std::string to_string(ScenarioId id);
/// Throws ConfigError("scenario", ...) for unknown names.
ScenarioId scenario_from_string(const std::string& name);

/// Drug exposure over generations [begin, end).
struct ScheduleSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool drug_on = true;

  friend bool operator==(const ScheduleSpan&, const ScheduleSpan&) = default;
};

struct AntibioticParams {
  double initial_frequency = 0.1;
  std::size_t resistance_locus = 0;
  double resistant_drug_on = 0.9;
  double susceptible_drug_on = 0.3;
  double resistant_drug_off = 0.55;
  double susceptible_drug_off = 0.65;

  friend bool operator==(const AntibioticParams&, const AntibioticParams&) = default;
};

enum class InitialPopulation { Random, Target };

struct MimicryParams {
  /// Model pattern; empty means the alternating pattern 1010... of locus_count bits.
  Genotype target;
  InitialPopulation initial = InitialPopulation::Random;
  double survival_base = 0.4;
  double survival_slope = 0.5;

  friend bool operator==(const MimicryParams&, const MimicryParams&) = default;
};

struct CooperationParams {
  GameMatrix matrix = GameMatrix::classic();
  StrategyKind opponent = StrategyKind::TitForTat;
  std::size_t episodes = 1000;
  std::size_t rounds = 20;
  /// Episodes played before the main phase with `warmup_epsilon` in place of
  /// learning.epsilon.
  std::size_t warmup_episodes = 0;
  double warmup_epsilon = 1.0;

  friend bool operator==(const CooperationParams&, const CooperationParams&) = default;
};

struct ScenarioConfig {
  ScenarioId scenario = ScenarioId::Antibiotic;
  EvolutionConfig evolution;
  LearningParams learning;
  std::vector<ScheduleSpan> schedule;
  AntibioticParams antibiotic;
  MimicryParams mimicry;
  CooperationParams cooperation;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;

  /// Documented defaults for a scenario: antibiotic N=500, L=1, G=40, mu=0,
  /// drug on throughout; mimicry N=500, L=20, G=60, mu=0.005; cooperation
  /// alpha=0.2, gamma=0.9, epsilon=0.2 against tit-for-tat.
  static ScenarioConfig defaults(ScenarioId id);

  /// Checks every invariant; throws ConfigError naming the field.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Per-replicate observables, one row per step (generation 0..G or episode
/// 0..E-1), columns ordered as TrajectorySet::observables.
struct ReplicateTrajectory {
  std::size_t replicate = 0;
  std::vector<std::vector<double>> rows;
  std::optional<std::uint64_t> extinct_at;
  /// Cooperation only: the learner's greedy policy after training.
  std::optional<Memory1Policy> greedy_policy;

  friend bool operator==(const ReplicateTrajectory&, const ReplicateTrajectory&) = default;
};

struct TrajectorySet {
  std::string step_label;
  std::vector<std::string> observables;
  std::vector<ReplicateTrajectory> replicates;

  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;
};

/// Environment tag in effect at `generation` under the schedule.
std::string antibiotic_environment(const std::vector<ScheduleSpan>& schedule,
                                   std::size_t generation);
FitnessLandscape antibiotic_landscape(const AntibioticParams& params);

Genotype mimicry_target(const ScenarioConfig& cfg);
double similarity(const Genotype& g, const Genotype& target);
FitnessLandscape mimicry_landscape(const MimicryParams& params, Genotype target);

/// Replicate k draws only from streams.stream("replicate", k), so its
/// trajectory does not depend on how many replicates run.
ReplicateTrajectory run_antibiotic_replicate(const ScenarioConfig& cfg, std::size_t replicate,
                                             RandomStream& rng);
ReplicateTrajectory run_mimicry_replicate(const ScenarioConfig& cfg, std::size_t replicate,
                                          RandomStream& rng);
ReplicateTrajectory run_cooperation_replicate(const ScenarioConfig& cfg, std::size_t replicate,
                                              RandomStream& rng);

/// `threads` = 0 picks the hardware concurrency. Output never depends on it.
TrajectorySet run_antibiotic(const ScenarioConfig& cfg, const RandomStreamTree& streams,
                             unsigned threads = 1);
TrajectorySet run_mimicry(const ScenarioConfig& cfg, const RandomStreamTree& streams,
                          unsigned threads = 1);
TrajectorySet run_cooperation(const ScenarioConfig& cfg, const RandomStreamTree& streams,
                              unsigned threads = 1);

/// Dispatches on cfg.scenario with streams rooted at cfg.seed.
TrajectorySet run_scenario(const ScenarioConfig& cfg, unsigned threads = 1);

}  // namespace evorl
