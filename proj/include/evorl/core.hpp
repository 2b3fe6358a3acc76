#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evorl/random.hpp"

namespace evorl {

/// Fixed-length haploid bit vector. Every locus holds 0 or 1.
class Genotype {
 public:
  Genotype() = default;
  explicit Genotype(std::size_t length, std::uint8_t fill = 0);
  Genotype(std::initializer_list<int> alleles);
  explicit Genotype(std::vector<std::uint8_t> alleles);

  /// Parses a string of '0'/'1' characters.
  static Genotype from_string(std::string_view bits);

  std::size_t size() const noexcept { return alleles_.size(); }
  std::uint8_t operator[](std::size_t locus) const { return alleles_[locus]; }
  std::uint8_t at(std::size_t locus) const;
  void set(std::size_t locus, std::uint8_t allele);
  void flip(std::size_t locus) { alleles_[locus] ^= 1U; }
  std::span<const std::uint8_t> alleles() const noexcept { return alleles_; }
  std::size_t count_ones() const noexcept;
  std::string to_string() const;

  friend bool operator==(const Genotype&, const Genotype&) = default;

 private:
  std::vector<std::uint8_t> alleles_;
};

struct Individual {
  Genotype genotype;
  std::uint64_t offspring_count = 0;
  bool alive = true;

  friend bool operator==(const Individual&, const Individual&) = default;
};

class Population {
 public:
  Population() = default;
  /// Throws DomainError if members disagree on genotype length.
  explicit Population(std::vector<Individual> members, std::uint64_t generation = 0);
  static Population from_genotypes(const std::vector<Genotype>& genotypes,
                                   std::uint64_t generation = 0);

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  std::uint64_t generation() const noexcept { return generation_; }
  /// Genotype length shared by all members; 0 for an empty population.
  std::size_t locus_count() const noexcept;

  const std::vector<Individual>& members() const noexcept { return members_; }
  std::vector<Individual>& members() noexcept { return members_; }
  const Individual& operator[](std::size_t i) const { return members_[i]; }

  friend bool operator==(const Population&, const Population&) = default;

 private:
  std::vector<Individual> members_;
  std::uint64_t generation_ = 0;
};

enum class LandscapeKind { Deterministic, Bernoulli, EnvironmentDependent };

/// Maps a genotype to a base value in [0, 1].
///
/// Deterministic landscapes emit the base value itself as reward. Bernoulli
/// landscapes emit a 0/1 reward with the base value as success probability.
/// Environment-dependent landscapes look the value up under the current
/// environment tag and emit it deterministically; `with_environment` switches
/// the tag without touching the mapping.
class FitnessLandscape {
 public:
  using ValueFn = std::function<double(const Genotype&)>;
  using EnvValueFn = std::function<double(const Genotype&, std::string_view env)>;

  static FitnessLandscape deterministic(ValueFn fn);
  static FitnessLandscape bernoulli(ValueFn fn);
  static FitnessLandscape environment_dependent(EnvValueFn fn, std::string environment);
  static FitnessLandscape constant(double value);

  LandscapeKind kind() const noexcept { return kind_; }
  const std::string& environment() const noexcept { return environment_; }
  FitnessLandscape with_environment(std::string environment) const;

  /// Base value for g. Throws ConfigError if it falls outside [0, 1] or is not finite.
  double value(const Genotype& g) const;
  /// One reward draw. Only Bernoulli landscapes consume randomness.
  double sample_reward(const Genotype& g, RandomStream& rng) const;

 private:
  FitnessLandscape(LandscapeKind kind, EnvValueFn fn, std::string environment);

  LandscapeKind kind_;
  EnvValueFn fn_;
  std::string environment_;
};

/// W = r / r_bar. Throws DomainError when r_bar <= 0.
double relative_fitness(double offspring, double mean_offspring);

/// Arithmetic mean of offspring_count. Throws DomainError on an empty population.
double population_mean_offspring(const Population& pop);

/// Relative fitness of every member against the population mean.
std::vector<double> relative_fitnesses(const Population& pop);

struct FitnessEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo estimate of E[r | g] from n reward draws. Deterministic and
/// environment-dependent landscapes return the exact value with zero error
/// without drawing. Standard error uses the n-1 sample deviation (0 when n = 1).
FitnessEstimate estimate_expected_fitness(const Genotype& g, const FitnessLandscape& land,
                                          std::size_t n, RandomStream& rng);

/// Compensated (Neumaier) sum; exact-to-rounding for repeated values.
double compensated_sum(std::span<const double> values);

/// Mean and standard error of a sample; shared by estimators and summaries.
FitnessEstimate mean_and_standard_error(std::span<const double> values);

}  // namespace evorl
