#include <doctest.h>

#include <cmath>
#include <vector>

#include "evorl/errors.hpp"
#include "evorl/harness.hpp"
#include "evorl/scenarios.hpp"

using namespace evorl;

namespace {

std::vector<double> mean_column(const TrajectorySet& set, std::size_t observable) {
  std::vector<double> means;
  for (const auto& row : summarize(set).rows) means.push_back(row.mean[observable]);
  return means;
}

ScenarioConfig antibiotic(double p0, bool drug_on, std::size_t replicates = 100) {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Antibiotic);
  cfg.antibiotic.initial_frequency = p0;
  cfg.schedule = {{0, cfg.evolution.generations, drug_on}};
  cfg.replicates = replicates;
  cfg.seed = 4242;
  return cfg;
}

}  // namespace

TEST_CASE("antibiotic: resistance sweeps under the drug") {
  const ScenarioConfig cfg = antibiotic(0.1, true);
  const auto freq = mean_column(run_scenario(cfg), 0);
  CHECK(freq.front() == doctest::Approx(0.1));
  CHECK(freq.back() > 0.9);
}

TEST_CASE("antibiotic: resistance declines without the drug") {
  const ScenarioConfig cfg = antibiotic(0.9, false);
  const SummaryTable summary = summarize(run_scenario(cfg));
  CHECK(summary.rows.back().mean[0] < 0.9);
  for (std::size_t g = 1; g < summary.rows.size(); ++g) {
    CAPTURE(g);
    const SummaryRow& before = summary.rows[g - 1];
    const SummaryRow& after = summary.rows[g];
    // Strict decline while selection dominates; once only a few copies remain
    // in the whole ensemble, drift may only wobble within sampling noise.
    if (before.mean[0] >= 0.01) {
      CHECK(after.mean[0] < before.mean[0]);
    } else {
      CHECK(after.mean[0] <= before.mean[0] +
                                3.0 * std::hypot(before.standard_error[0], after.standard_error[0]));
    }
  }
}

TEST_CASE("antibiotic: no variation means no response") {
  ScenarioConfig cfg = antibiotic(0.0, true, 20);
  cfg.evolution.generations = 60;
  cfg.schedule = {{0, 20, true}, {20, 40, false}, {40, 60, true}};
  const TrajectorySet set = run_scenario(cfg);
  for (const auto& rep : set.replicates) {
    for (const auto& row : rep.rows) REQUIRE(row[0] == 0.0);
  }
}

TEST_CASE("antibiotic: schedule switches the environment") {
  const std::vector<ScheduleSpan> schedule{{0, 2, true}, {2, 5, false}};
  CHECK(antibiotic_environment(schedule, 0) == "drug_on");
  CHECK(antibiotic_environment(schedule, 1) == "drug_on");
  CHECK(antibiotic_environment(schedule, 2) == "drug_off");
  CHECK(antibiotic_environment(schedule, 4) == "drug_off");
  const auto land = antibiotic_landscape({});
  CHECK(land.value(Genotype{1}) == 0.9);
  CHECK(land.with_environment("drug_off").value(Genotype{0}) == 0.65);
}

TEST_CASE("antibiotic: schedule invariants") {
  ScenarioConfig cfg = antibiotic(0.1, true);
  auto field_of = [&]() -> std::string {
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  cfg.schedule = {{0, 25, true}, {20, 40, false}};
  CHECK(field_of() == "schedule[1]");
  cfg.schedule = {{0, 20, true}, {21, 40, false}};
  CHECK(field_of() == "schedule[1]");
  cfg.schedule = {{0, 30, true}};
  CHECK(field_of() == "schedule");
  cfg.schedule = {{0, 0, true}, {0, 40, true}};
  CHECK(field_of() == "schedule[0]");
  cfg.schedule = {};
  CHECK(field_of() == "schedule");
}

TEST_CASE("mimicry: a population at the model pattern stays there") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Mimicry);
  cfg.evolution.mutation_rate = 0.0;
  cfg.mimicry.initial = InitialPopulation::Target;
  cfg.replicates = 5;
  const TrajectorySet set = run_scenario(cfg);
  for (const auto& rep : set.replicates) {
    for (const auto& row : rep.rows) REQUIRE(row[0] == 1.0);
  }
}

TEST_CASE("mimicry: resemblance to the model evolves") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Mimicry);
  cfg.seed = 99;
  const auto sim = mean_column(run_scenario(cfg), 0);
  CHECK(std::abs(sim.front() - 0.5) < 0.01);
  CHECK(sim.back() > 0.8);
  for (std::size_t g = 1; g < sim.size(); ++g) {
    CAPTURE(g);
    CHECK(sim[g] > sim[g - 1]);
  }
}

TEST_CASE("mimicry: ablating feedback removes the trend") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Mimicry);
  cfg.seed = 5;
  cfg.evolution.mutation_rate = 0.0;
  cfg.mimicry.survival_base = 0.7;
  cfg.mimicry.survival_slope = 0.0;
  const TrajectorySet set = run_scenario(cfg);
  std::vector<double> change;
  for (const auto& rep : set.replicates) change.push_back(rep.rows.back()[0] - rep.rows.front()[0]);
  const auto est = mean_and_standard_error(change);
  CHECK(std::abs(est.mean) <= 3.0 * est.standard_error);
}

TEST_CASE("mimicry: config checks") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Mimicry);
  CHECK(cfg.mimicry.target == Genotype::from_string("10101010101010101010"));
  cfg.mimicry.survival_slope = 0.7;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ScenarioConfig::defaults(ScenarioId::Mimicry);
  cfg.evolution.locus_count = 10;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("cooperation: the learner cooperates with TitForTat when the future matters") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Cooperation);
  cfg.replicates = 20;
  cfg.seed = 31337;
  const TrajectorySet set = run_scenario(cfg);
  std::size_t cooperative = 0;
  for (const auto& rep : set.replicates) {
    REQUIRE(rep.greedy_policy.has_value());
    if (rep.greedy_policy->reply[0] == Move::Cooperate) ++cooperative;
  }
  CHECK(cooperative >= 19);
  // Late-episode cooperation approaches 1 - epsilon / 2.
  CHECK(mean_column(set, 0).back() > 0.8);
}

TEST_CASE("cooperation: a myopic learner defects everywhere") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Cooperation);
  cfg.learning = {0.5, 0.0, 0.0};
  cfg.cooperation.warmup_episodes = 200;
  cfg.cooperation.warmup_epsilon = 1.0;
  cfg.cooperation.episodes = 50;
  cfg.replicates = 10;
  const TrajectorySet set = run_scenario(cfg);
  for (const auto& rep : set.replicates) {
    CHECK(*rep.greedy_policy == Memory1Policy::always_defect());
    CHECK(rep.rows.back()[0] == 0.0);
  }
}

TEST_CASE("cooperation: without exploration the tie-break opens with C and the seed is irrelevant") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Cooperation);
  cfg.learning.epsilon = 0.0;
  cfg.cooperation.episodes = 30;
  cfg.replicates = 3;
  cfg.seed = 1;
  const TrajectorySet a = run_scenario(cfg);
  cfg.seed = 2;
  const TrajectorySet b = run_scenario(cfg);
  CHECK(a == b);
  for (const auto& rep : a.replicates) {
    CHECK(rep.rows.front()[0] == 1.0);
    CHECK(rep.rows.front()[1] == 3.0 * static_cast<double>(cfg.cooperation.rounds));
  }
}

TEST_CASE("scenario runs are reproducible and replicate-count invariant") {
  for (const auto id : {ScenarioId::Antibiotic, ScenarioId::Mimicry, ScenarioId::Cooperation}) {
    CAPTURE(to_string(id));
    ScenarioConfig cfg = ScenarioConfig::defaults(id);
    cfg.replicates = 10;
    if (id != ScenarioId::Cooperation) cfg.evolution.population_size = 60;
    cfg.cooperation.episodes = 100;
    const TrajectorySet ten = run_scenario(cfg, 1);
    CHECK(ten == run_scenario(cfg, 1));
    CHECK(ten == run_scenario(cfg, 4));
    cfg.replicates = 5;
    const TrajectorySet five = run_scenario(cfg, 1);
    for (std::size_t k = 0; k < 5; ++k) CHECK(five.replicates[k] == ten.replicates[k]);
  }
}

TEST_CASE("every (replicate, step) is recorded with finite observables") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Antibiotic);
  cfg.replicates = 4;
  cfg.evolution.generations = 12;
  cfg.schedule = {{0, 12, false}};
  const TrajectorySet set = run_scenario(cfg);
  REQUIRE(set.replicates.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(set.replicates[k].replicate == k);
    REQUIRE(set.replicates[k].rows.size() == 13);
    for (const auto& row : set.replicates[k].rows) {
      REQUIRE(row.size() == 2);
      for (const double v : row) REQUIRE(std::isfinite(v));
    }
  }
}

TEST_CASE("extinct replicates are reported and zero-filled") {
  ScenarioConfig cfg = ScenarioConfig::defaults(ScenarioId::Antibiotic);
  cfg.replicates = 2;
  cfg.evolution.generations = 5;
  cfg.schedule = {{0, 5, true}};
  cfg.antibiotic.resistant_drug_on = 0.0;
  cfg.antibiotic.susceptible_drug_on = 0.0;
  const TrajectorySet set = run_scenario(cfg);
  for (const auto& rep : set.replicates) {
    CHECK(rep.extinct_at == std::optional<std::uint64_t>(1));
    REQUIRE(rep.rows.size() == 6);
    for (std::size_t g = 1; g < 6; ++g) CHECK(rep.rows[g] == std::vector<double>{0.0, 0.0});
  }
}
