#include "evorl/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "evorl/errors.hpp"

namespace evorl {

namespace {

std::uint8_t checked_allele(long value) {
  if (value != 0 && value != 1) {
    throw DomainError("genotype loci must be 0 or 1, got " + std::to_string(value));
  }
  return static_cast<std::uint8_t>(value);
}

}  // namespace

Genotype::Genotype(std::size_t length, std::uint8_t fill)
    : alleles_(length, checked_allele(fill)) {}

Genotype::Genotype(std::initializer_list<int> alleles) {
  alleles_.reserve(alleles.size());
  for (const int a : alleles) alleles_.push_back(checked_allele(a));
}

Genotype::Genotype(std::vector<std::uint8_t> alleles) : alleles_(std::move(alleles)) {
  for (const auto a : alleles_) checked_allele(a);
}

Genotype Genotype::from_string(std::string_view bits) {
  std::vector<std::uint8_t> alleles;
  alleles.reserve(bits.size());
  for (const char c : bits) {
    if (c != '0' && c != '1') {
      throw DomainError(std::string("genotype string may only contain '0' and '1', got '") +
                        c + "'");
    }
    alleles.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Genotype(std::move(alleles));
}

std::uint8_t Genotype::at(std::size_t locus) const {
  if (locus >= alleles_.size()) {
    throw DomainError("locus " + std::to_string(locus) + " out of range for genotype of length " +
                      std::to_string(alleles_.size()));
  }
  return alleles_[locus];
}

void Genotype::set(std::size_t locus, std::uint8_t allele) {
  at(locus);
  alleles_[locus] = checked_allele(allele);
}

std::size_t Genotype::count_ones() const noexcept {
  return static_cast<std::size_t>(std::count(alleles_.begin(), alleles_.end(), std::uint8_t{1}));
}

std::string Genotype::to_string() const {
  std::string s;
  s.reserve(alleles_.size());
  for (const auto a : alleles_) s.push_back(static_cast<char>('0' + a));
  return s;
}

Population::Population(std::vector<Individual> members, std::uint64_t generation)
    : members_(std::move(members)), generation_(generation) {
  if (!members_.empty()) {
    const std::size_t length = members_.front().genotype.size();
    for (const auto& m : members_) {
      if (m.genotype.size() != length) {
        throw DomainError("population members must share one genotype length");
      }
    }
  }
}

Population Population::from_genotypes(const std::vector<Genotype>& genotypes,
                                      std::uint64_t generation) {
  std::vector<Individual> members;
  members.reserve(genotypes.size());
  for (const auto& g : genotypes) members.push_back(Individual{g, 0, true});
  return Population(std::move(members), generation);
}

std::size_t Population::locus_count() const noexcept {
  return members_.empty() ? 0 : members_.front().genotype.size();
}

FitnessLandscape::FitnessLandscape(LandscapeKind kind, EnvValueFn fn, std::string environment)
    : kind_(kind), fn_(std::move(fn)), environment_(std::move(environment)) {}

FitnessLandscape FitnessLandscape::deterministic(ValueFn fn) {
  return FitnessLandscape(
      LandscapeKind::Deterministic,
      [f = std::move(fn)](const Genotype& g, std::string_view) { return f(g); }, {});
}

FitnessLandscape FitnessLandscape::bernoulli(ValueFn fn) {
  return FitnessLandscape(
      LandscapeKind::Bernoulli,
      [f = std::move(fn)](const Genotype& g, std::string_view) { return f(g); }, {});
}

FitnessLandscape FitnessLandscape::environment_dependent(EnvValueFn fn, std::string environment) {
  return FitnessLandscape(LandscapeKind::EnvironmentDependent, std::move(fn),
                          std::move(environment));
}

FitnessLandscape FitnessLandscape::constant(double value) {
  return deterministic([value](const Genotype&) { return value; });
}

FitnessLandscape FitnessLandscape::with_environment(std::string environment) const {
  FitnessLandscape copy = *this;
  copy.environment_ = std::move(environment);
  return copy;
}

double FitnessLandscape::value(const Genotype& g) const {
  const double v = fn_(g, environment_);
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw ConfigError("landscape", "value " + std::to_string(v) + " for genotype " +
                                       g.to_string() + " lies outside [0, 1]");
  }
  return v;
}

double FitnessLandscape::sample_reward(const Genotype& g, RandomStream& rng) const {
  const double v = value(g);
  if (kind_ == LandscapeKind::Bernoulli) return rng.bernoulli(v) ? 1.0 : 0.0;
  return v;
}

double relative_fitness(double offspring, double mean_offspring) {
  if (!(mean_offspring > 0.0)) {
    throw DomainError("relative_fitness: mean offspring count must be positive "
                      "(empty or sterile population)");
  }
  if (offspring < 0.0) throw DomainError("relative_fitness: negative offspring count");
  return offspring / mean_offspring;
}

double population_mean_offspring(const Population& pop) {
  if (pop.empty()) throw DomainError("population_mean_offspring: empty population");
  std::uint64_t total = 0;
  for (const auto& m : pop.members()) total += m.offspring_count;
  return static_cast<double>(total) / static_cast<double>(pop.size());
}

std::vector<double> relative_fitnesses(const Population& pop) {
  const double mean = population_mean_offspring(pop);
  std::vector<double> w;
  w.reserve(pop.size());
  for (const auto& m : pop.members()) {
    w.push_back(relative_fitness(static_cast<double>(m.offspring_count), mean));
  }
  return w;
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    compensation += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + compensation;
}

FitnessEstimate mean_and_standard_error(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean_and_standard_error: no samples");
  const double first = values.front();
  if (std::all_of(values.begin(), values.end(), [first](double v) { return v == first; })) {
    return {first, 0.0};
  }
  const double n = static_cast<double>(values.size());
  const double mean = compensated_sum(values) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

FitnessEstimate estimate_expected_fitness(const Genotype& g, const FitnessLandscape& land,
                                          std::size_t n, RandomStream& rng) {
  if (n == 0) throw DomainError("estimate_expected_fitness: sample count must be >= 1");
  if (land.kind() != LandscapeKind::Bernoulli) return {land.value(g), 0.0};
  std::vector<double> draws(n);
  for (auto& d : draws) d = land.sample_reward(g, rng);
  return mean_and_standard_error(draws);
}

}  // namespace evorl
