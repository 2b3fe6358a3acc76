#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "evorl/core.hpp"
#include "evorl/random.hpp"

namespace evorl {

/// Coefficients of the closed-form one-generation frequency change
/// delta_p = h2 * sel_coeff * (p - mean_fitness_w).
struct SelectionParams {
  double h2 = 0.0;
  double sel_coeff = 0.0;
  double mean_fitness_w = 0.0;

  /// Throws DomainError on non-finite fields or h2 outside [0, 1].
  void validate() const;
};

double selection_delta(double p, const SelectionParams& params);

enum class ReproductionWeighting {
  /// Parents drawn in proportion to their landscape value.
  Landscape,
  /// Parents drawn uniformly among survivors.
  Uniform,
};

struct EvolutionConfig {
  std::size_t population_size = 500;
  double mutation_rate = 0.0;
  std::size_t locus_count = 1;
  std::size_t generations = 40;
  ReproductionWeighting reproduction = ReproductionWeighting::Landscape;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

enum class SurvivalOutcome : std::uint8_t { Die = 0, Live = 1 };

/// Bernoulli survival draw with success probability land.value(genotype).
/// The returned copy has `alive` set from the outcome.
Individual survival_trial(const Individual& ind, const FitnessLandscape& land, RandomStream& rng);

/// Flips each locus independently with probability mu (one draw per locus).
Genotype mutate(const Genotype& g, double mu, RandomStream& rng);

struct GenerationStep {
  /// The input population with `alive` and `offspring_count` filled in.
  Population parents;
  /// N offspring at generation parents.generation() + 1; empty on extinction.
  Population offspring;
  /// Set when no member survived; holds the generation index that could not
  /// be produced.
  std::optional<std::uint64_t> extinct_at;

  bool extinct() const noexcept { return extinct_at.has_value(); }
};

/// One synchronous generation: survival filter, fitness-weighted resampling
/// of N offspring among survivors, then mutation of every offspring.
GenerationStep step_generation(const Population& pop, const FitnessLandscape& land,
                               const EvolutionConfig& cfg, RandomStream& rng);

/// Fraction of members carrying allele 1 at `locus`.
double allele_frequency(const Population& pop, std::size_t locus);

/// Mean landscape value over members.
double mean_landscape_value(const Population& pop, const FitnessLandscape& land);

/// Index of the first cumulative weight strictly above u * total.
/// Weights are scanned in stored order; zero-weight entries are never chosen.
std::size_t sample_weighted_index(std::span<const double> cumulative, RandomStream& rng);

}  // namespace evorl
