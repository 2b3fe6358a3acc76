#include <doctest.h>

#include <cmath>
#include <vector>

#include "evorl/errors.hpp"
#include "evorl/oracles.hpp"
#include "evorl/rl.hpp"

using namespace evorl;

namespace {

QTable random_table(std::size_t states, std::size_t actions, RandomStream& rng) {
  QTable q(states, actions);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < actions; ++a) q.set(s, a, rng.uniform01() * 20.0 - 10.0);
  }
  return q;
}

class ConstantRewardEnv final : public Environment {
 public:
  explicit ConstantRewardEnv(double reward) : reward_(reward) {}
  std::size_t state_count() const override { return 2; }
  std::size_t action_count() const override { return 2; }
  StateIndex reset(RandomStream&) override { return 0; }
  Transition transition(StateIndex s, ActionIndex, RandomStream&) override {
    return {s, reward_, true};
  }

 private:
  double reward_;
};

class FaultyEnv final : public Environment {
 public:
  std::size_t state_count() const override { return 1; }
  std::size_t action_count() const override { return 1; }
  StateIndex reset(RandomStream&) override { return 0; }
  Transition transition(StateIndex, ActionIndex, RandomStream&) override {
    if (++calls_ == 3) throw std::runtime_error("sensor offline");
    return {0, 1.0, false};
  }

 private:
  int calls_ = 0;
};

}  // namespace

TEST_CASE("q_update direct substitution") {
  SUBCASE("zero learning rate leaves the table unchanged") {
    RandomStream rng(1);
    QTable q = random_table(3, 2, rng);
    const QTable before = q;
    q_update(q, 1, 0, 5.0, 2, {0.0, 0.9, 0.1});
    CHECK(q == before);
  }
  SUBCASE("full overwrite without bootstrapping") {
    QTable q(3, 2);
    q_update(q, 1, 1, 2.0, 2, {1.0, 0.0, 0.1});
    CHECK(q(1, 1) == 2.0);
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t a = 0; a < 2; ++a) {
        if (s != 1 || a != 1) CHECK(q(s, a) == 0.0);
      }
    }
  }
  SUBCASE("half step") {
    QTable q(2, 2);
    q_update(q, 0, 0, 1.0, 1, {0.5, 0.9, 0.1});
    CHECK(q(0, 0) == 0.5);
  }
  SUBCASE("bootstrap uses the best next action") {
    QTable q(2, 2);
    q.set(1, 0, 4.0);
    q.set(1, 1, -3.0);
    q_update(q, 0, 1, 1.0, 1, {0.5, 0.5, 0.1});
    CHECK(q(0, 1) == 0.5 * (1.0 + 0.5 * 4.0));
  }
  SUBCASE("terminal transitions ignore the next state's values") {
    QTable q(2, 2);
    q.set(1, 0, 100.0);
    q_update(q, 0, 0, 1.0, 1, {1.0, 0.9, 0.1}, true);
    CHECK(q(0, 0) == 1.0);
  }
}

TEST_CASE("q_update rejects out-of-range indices and bad rewards") {
  QTable q(2, 2);
  const LearningParams p{0.5, 0.9, 0.1};
  CHECK_THROWS_AS(q_update(q, 2, 0, 1.0, 0, p), DomainError);
  CHECK_THROWS_AS(q_update(q, 0, 2, 1.0, 0, p), DomainError);
  CHECK_THROWS_AS(q_update(q, 0, 0, 1.0, 2, p), DomainError);
  CHECK_THROWS_AS(q_update(q, 0, 0, std::nan(""), 1, p), DomainError);
}

TEST_CASE("q_update touches exactly one entry") {
  RandomStream rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t ns = 1 + rng.uniform_index(8);
    const std::size_t na = 1 + rng.uniform_index(4);
    QTable q = random_table(ns, na, rng);
    const QTable before = q;
    const StateIndex s = rng.uniform_index(ns);
    const ActionIndex a = rng.uniform_index(na);
    const LearningParams p{0.01 + 0.99 * rng.uniform01(), 0.99 * rng.uniform01(), 0.1};
    q_update(q, s, a, rng.uniform01() * 4.0 - 2.0, rng.uniform_index(ns), p);
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t j = 0; j < na; ++j) {
        if (i != s || j != a) REQUIRE(q(i, j) == before(i, j));
      }
    }
  }
}

TEST_CASE("a Bellman-consistent entry is a fixed point of q_update") {
  RandomStream rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    QTable q = random_table(4, 3, rng);
    const StateIndex s = rng.uniform_index(4);
    const ActionIndex a = rng.uniform_index(3);
    StateIndex next = rng.uniform_index(4);
    if (next == s) next = (s + 1) % 4;
    const LearningParams p{0.01 + 0.99 * rng.uniform01(), 0.99 * rng.uniform01(), 0.1};
    const double reward = rng.uniform01() * 4.0 - 2.0;
    q.set(s, a, reward + p.gamma * q.max_value(next));
    const double before = q(s, a);
    q_update(q, s, a, reward, next, p);
    REQUIRE(std::abs(q(s, a) - before) <= 1e-12);
  }
}

TEST_CASE("greedy_action") {
  QTable q(3, 2);
  q.set(0, 0, 0.1);
  q.set(0, 1, 0.9);
  q.set(1, 0, 0.5);
  q.set(1, 1, 0.5);
  q.set(2, 0, -1.0);
  q.set(2, 1, -2.0);
  CHECK(greedy_action(q, 0) == 1);
  CHECK(greedy_action(q, 1) == 0);
  CHECK(greedy_action(q, 2) == 0);
}

TEST_CASE("greedy_action ignores a constant shift of the row") {
  RandomStream rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    QTable q(1, 4);
    for (std::size_t a = 0; a < 4; ++a) {
      q.set(0, a, static_cast<double>(rng.uniform_index(5)));  // integers force ties
    }
    const ActionIndex before = greedy_action(q, 0);
    const double shift = static_cast<double>(rng.uniform_index(200)) - 100.0;
    for (std::size_t a = 0; a < 4; ++a) q.set(0, a, q(0, a) + shift);
    REQUIRE(greedy_action(q, 0) == before);
  }
}

TEST_CASE("epsilon_greedy_action frequencies") {
  QTable q(1, 2);
  q.set(0, 1, 1.0);
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) REQUIRE(epsilon_greedy_action(q, 0, {0.5, 0.9, 0.0}, rng) == 1);

  std::size_t ones = 0;
  for (int i = 0; i < 100000; ++i) ones += epsilon_greedy_action(q, 0, {0.5, 0.9, 1.0}, rng);
  CHECK(std::abs(static_cast<double>(ones) / 1e5 - 0.5) <= 0.01);

  ones = 0;
  for (int i = 0; i < 100000; ++i) ones += epsilon_greedy_action(q, 0, {0.5, 0.9, 0.1}, rng);
  CHECK(std::abs(static_cast<double>(ones) / 1e5 - (1.0 - 0.1 + 0.1 / 2.0)) <= 0.005);
}

TEST_CASE("estimate_reward") {
  RandomStream rng(6);
  ConstantRewardEnv deterministic(3.0);
  CHECK(estimate_reward(deterministic, 0, 0, 1, rng) == 3.0);
  CHECK(estimate_reward(deterministic, 1, 1, 17, rng) == 3.0);
  CHECK_THROWS_AS(estimate_reward(deterministic, 0, 0, 0, rng), DomainError);

  BernoulliBandit coin({0.25});
  CHECK(std::abs(estimate_reward(coin, 0, 0, 40000, rng) - 0.25) <= 0.01);

  // An absorbing state whose only move is a terminal self-loop paying 0.75.
  TabularMdp absorbing({{{0, 0.75, true}}}, {0});
  CHECK(estimate_reward(absorbing, 0, 0, 9, rng) == 0.75);
}

TEST_CASE("train on a two-armed bandit prefers the paying arm") {
  RandomStream rng(7);
  TabularMdp bandit({{{0, 0.0, true}, {0, 1.0, true}}}, {0});
  const auto result = train(bandit, {0.5, 0.0, 0.2}, 500, 1, rng);
  CHECK(greedy_action(result.q, 0) == 1);
  CHECK(result.episode_returns.size() == 500);
  CHECK(std::abs(result.q(0, 1) - 1.0) < 1e-6);
}

TEST_CASE("train with alpha = 0 leaves the initial table") {
  RandomStream rng(8);
  TabularMdp bandit({{{0, 0.0, true}, {0, 1.0, true}}}, {0});
  const auto result = train(bandit, {0.0, 0.9, 0.5}, 1, 1, rng);
  CHECK(result.q == QTable(1, 2));
}

TEST_CASE("trained Q matches value iteration on every reference MDP") {
  for (const auto& [name, mdp, gamma] : oracles::reference_mdps()) {
    CAPTURE(name);
    const auto oracle = oracles::value_iteration(mdp, gamma, 1e-12);
    REQUIRE(oracle.final_change < 1e-12);
    TabularMdp env = mdp;
    RandomStream rng(9);
    const auto trained = train(env, {0.5, gamma, 1.0}, 4000, 50, rng);
    CHECK(oracles::sup_norm_distance(trained.q, oracle.q) <= 1e-3);
  }
}

TEST_CASE("two-state chain value iteration fixed point") {
  // Staying in state 1 pays 1 forever, so V(1) = 1 / (1 - 0.9) = 10.
  const auto mdps = oracles::reference_mdps();
  const auto oracle = oracles::value_iteration(mdps.front().mdp, 0.9);
  CHECK(oracle.q[1][0] == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(oracle.q[0][1] == doctest::Approx(9.0).epsilon(1e-10));
}

TEST_CASE("training is deterministic per seed") {
  const auto mdps = oracles::reference_mdps();
  auto run = [&](std::uint64_t seed) {
    TabularMdp env = mdps[2].mdp;
    RandomStream rng(seed);
    return train(env, {0.3, 0.95, 0.3}, 200, 30, rng);
  };
  const auto a = run(10);
  const auto b = run(10);
  CHECK(a.q == b.q);
  CHECK(a.episode_returns == b.episode_returns);
}

TEST_CASE("environment faults carry episode and step context") {
  RandomStream rng(11);
  FaultyEnv env;
  try {
    train(env, {0.5, 0.9, 0.1}, 5, 2, rng);
    FAIL("expected an EnvironmentError");
  } catch (const EnvironmentError& e) {
    CHECK(std::string(e.what()) == "episode 1, step 0: sensor offline");
  }
}

TEST_CASE("learning parameter validation names the field") {
  try {
    LearningParams{0.5, 1.0, 0.1}.validate();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "learning.gamma");
  }
  CHECK_THROWS_AS((LearningParams{0.0, 0.5, 0.1}.validate()), ConfigError);
  CHECK_THROWS_AS((LearningParams{0.5, 0.5, 1.1}.validate()), ConfigError);
}
