#include "evorl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "evorl/errors.hpp"
#include "exact_decimal.hpp"

namespace evorl {

void SelectionParams::validate() const {
  if (!std::isfinite(h2) || !std::isfinite(sel_coeff) || !std::isfinite(mean_fitness_w)) {
    throw DomainError("selection parameters must be finite");
  }
  if (h2 < 0.0 || h2 > 1.0) throw DomainError("heritability h2 must lie in [0, 1]");
}

double selection_delta(double p, const SelectionParams& params) {
  params.validate();
  if (!std::isfinite(p)) throw DomainError("selection_delta: trait frequency must be finite");
  if (p < 0.0 || p > 1.0) throw DomainError("selection_delta: trait frequency must lie in [0, 1]");
  // Evaluated exactly and rounded once, so decimal inputs give the decimal answer.
  using detail::decimal_rational;
  const detail::Rational delta = decimal_rational(params.h2) * decimal_rational(params.sel_coeff) *
                                 (decimal_rational(p) - decimal_rational(params.mean_fitness_w));
  return delta.convert_to<double>();
}

void EvolutionConfig::validate() const {
  if (population_size < 2) {
    throw ConfigError("evolution.population_size", "must be >= 2");
  }
  if (!std::isfinite(mutation_rate) || mutation_rate < 0.0 || mutation_rate > 1.0) {
    throw ConfigError("evolution.mutation_rate", "must lie in [0, 1]");
  }
  if (locus_count < 1) throw ConfigError("evolution.locus_count", "must be >= 1");
  if (generations < 1) throw ConfigError("evolution.generations", "must be >= 1");
}

Individual survival_trial(const Individual& ind, const FitnessLandscape& land, RandomStream& rng) {
  Individual out = ind;
  out.alive = rng.bernoulli(land.value(ind.genotype));
  return out;
}

Genotype mutate(const Genotype& g, double mu, RandomStream& rng) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("mutate: mu must lie in [0, 1]");
  Genotype out = g;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (rng.bernoulli(mu)) out.flip(i);
  }
  return out;
}

std::size_t sample_weighted_index(std::span<const double> cumulative, RandomStream& rng) {
  if (cumulative.empty() || !(cumulative.back() > 0.0)) {
    throw DomainError("sample_weighted_index: total weight must be positive");
  }
  const double target = rng.uniform01() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  // target < total, so upper_bound always lands inside the range.
  return static_cast<std::size_t>(it - cumulative.begin());
}

GenerationStep step_generation(const Population& pop, const FitnessLandscape& land,
                               const EvolutionConfig& cfg, RandomStream& rng) {
  cfg.validate();
  if (pop.size() != cfg.population_size) {
    throw DomainError("step_generation: population has " + std::to_string(pop.size()) +
                      " members, config expects " + std::to_string(cfg.population_size));
  }

  std::vector<Individual> parents;
  parents.reserve(pop.size());
  std::vector<std::size_t> survivors;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& member : pop.members()) {
    Individual p = survival_trial(member, land, rng);
    p.offspring_count = 0;
    if (p.alive) {
      const double w = cfg.reproduction == ReproductionWeighting::Landscape
                           ? land.value(p.genotype)
                           : 1.0;
      total += w;
      survivors.push_back(parents.size());
      cumulative.push_back(total);
    }
    parents.push_back(std::move(p));
  }

  GenerationStep result;
  const std::uint64_t next_generation = pop.generation() + 1;
  if (survivors.empty()) {
    result.parents = Population(std::move(parents), pop.generation());
    result.offspring = Population({}, next_generation);
    result.extinct_at = next_generation;
    return result;
  }

  std::vector<Individual> offspring;
  offspring.reserve(cfg.population_size);
  for (std::size_t k = 0; k < cfg.population_size; ++k) {
    Individual& parent = parents[survivors[sample_weighted_index(cumulative, rng)]];
    ++parent.offspring_count;
    offspring.push_back(Individual{mutate(parent.genotype, cfg.mutation_rate, rng), 0, true});
  }
  result.parents = Population(std::move(parents), pop.generation());
  result.offspring = Population(std::move(offspring), next_generation);
  return result;
}

double allele_frequency(const Population& pop, std::size_t locus) {
  if (pop.empty()) throw DomainError("allele_frequency: empty population");
  if (locus >= pop.locus_count()) {
    throw DomainError("allele_frequency: locus " + std::to_string(locus) + " out of range");
  }
  std::size_t ones = 0;
  for (const auto& m : pop.members()) ones += m.genotype[locus];
  return static_cast<double>(ones) / static_cast<double>(pop.size());
}

double mean_landscape_value(const Population& pop, const FitnessLandscape& land) {
  if (pop.empty()) throw DomainError("mean_landscape_value: empty population");
  std::vector<double> values;
  values.reserve(pop.size());
  for (const auto& m : pop.members()) values.push_back(land.value(m.genotype));
  return compensated_sum(values) / static_cast<double>(pop.size());
}

}  // namespace evorl
