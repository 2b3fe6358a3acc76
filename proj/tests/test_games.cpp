#include <doctest.h>

#include <numeric>
#include <vector>

#include "evorl/errors.hpp"
#include "evorl/games.hpp"

using namespace evorl;

namespace {

constexpr Move C = Move::Cooperate;
constexpr Move D = Move::Defect;

std::vector<Memory1Policy> all_memory1_policies() {
  std::vector<Memory1Policy> policies;
  for (unsigned bits = 0; bits < 32; ++bits) {
    Memory1Policy p;
    p.first = (bits & 1U) ? D : C;
    for (unsigned i = 0; i < 4; ++i) p.reply[i] = (bits >> (i + 1)) & 1U ? D : C;
    policies.push_back(p);
  }
  return policies;
}

}  // namespace

TEST_CASE("payoff cells of the classic matrix") {
  const auto m = GameMatrix::classic();
  CHECK(payoff(m, C, C) == PayoffPair{3, 3});
  CHECK(payoff(m, D, C) == PayoffPair{5, 0});
  CHECK(payoff(m, C, D) == PayoffPair{0, 5});
  CHECK(payoff(m, D, D) == PayoffPair{1, 1});
}

TEST_CASE("matrix validation accepts exactly the prisoner's dilemmas") {
  RandomStream rng(1);
  for (int trial = 0; trial < 5000; ++trial) {
    double v[4];
    for (auto& x : v) x = static_cast<double>(rng.uniform_index(7));
    const bool dilemma = v[0] > v[1] && v[1] > v[2] && v[2] > v[3] && 2 * v[1] > v[0] + v[3];
    bool accepted = true;
    try {
      GameMatrix(v[0], v[1], v[2], v[3]);
    } catch (const ConfigError& e) {
      accepted = false;
      REQUIRE(e.field() == "cooperation.matrix");
    }
    REQUIRE(accepted == dilemma);
  }
  CHECK_THROWS_AS(GameMatrix(6, 3, 1, 0), ConfigError);  // 2R = T + S
  CHECK_THROWS_AS(GameMatrix(5, 3, 3, 0), ConfigError);
}

TEST_CASE("play_match traces of the reference strategies") {
  const auto m = GameMatrix::classic();
  RandomStream rng(2);

  SUBCASE("AllD exploits AllC") {
    Strategy a = Strategy::all_defect();
    Strategy b = Strategy::all_cooperate();
    const auto r = play_match(a, b, 10, m, rng);
    CHECK(r.score_a == 50);
    CHECK(r.score_b == 0);
    CHECK(r.rounds == 10);
  }
  SUBCASE("TitForTat mirrors itself into full cooperation") {
    Strategy a = Strategy::tit_for_tat();
    Strategy b = Strategy::tit_for_tat();
    const auto r = play_match(a, b, 10, m, rng);
    CHECK(r.score_a == 30);
    CHECK(r.score_b == 30);
    for (const auto& mv : r.moves) CHECK(mv == std::pair{C, C});
  }
  SUBCASE("Grim retaliates forever") {
    Strategy a = Strategy::grim();
    Strategy b = Strategy::all_defect();
    const auto r = play_match(a, b, 3, m, rng);
    CHECK(r.moves[0].first == C);
    CHECK(r.moves[1].first == D);
    CHECK(r.moves[2].first == D);
    CHECK(r.score_a == 2);
    CHECK(r.score_b == 7);
  }
  SUBCASE("zero rounds") {
    Strategy a = Strategy::grim();
    Strategy b = Strategy::all_defect();
    CHECK_THROWS_AS(play_match(a, b, 0, m, rng), DomainError);
  }
}

TEST_CASE("match scores equal the payoff sum over recorded moves") {
  const auto m = GameMatrix::classic();
  const auto policies = all_memory1_policies();
  RandomStream rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto pick = [&]() {
      if (rng.uniform_index(3) == 0) return Strategy::q_learner({0.3, 0.9, 0.3});
      return Strategy::memory1(policies[rng.uniform_index(policies.size())]);
    };
    Strategy a = pick();
    Strategy b = pick();
    const auto r = play_match(a, b, 1 + rng.uniform_index(60), m, rng);
    double sa = 0;
    double sb = 0;
    for (const auto& [x, y] : r.moves) {
      sa += payoff(m, x, y).mine;
      sb += payoff(m, x, y).theirs;
    }
    REQUIRE(r.score_a == sa);
    REQUIRE(r.score_b == sb);
    REQUIRE(r.moves.size() == r.rounds);
  }
}

TEST_CASE("discounted_policy_value closed forms") {
  const auto m = GameMatrix::classic();
  const auto tft = Memory1Policy::tit_for_tat();
  CHECK(discounted_policy_value(Memory1Policy::always_cooperate(), tft, m, 0.9) == 30.0);
  CHECK(discounted_policy_value(Memory1Policy::always_defect(), tft, m, 0.9) == 14.0);
  CHECK(discounted_policy_value(Memory1Policy::always_defect(), Memory1Policy::always_cooperate(),
                                m, 0.0) == 5.0);
  // Grim against AllD: 0 then 1 forever, 0.5 / (1 - 0.5) = 1.
  CHECK(discounted_policy_value(Memory1Policy::grim(), Memory1Policy::always_defect(), m, 0.5) ==
        1.0);
  CHECK_THROWS_AS(discounted_policy_value(tft, tft, m, 1.0), DomainError);
}

TEST_CASE("cooperating with TitForTat beats defecting against it") {
  const auto m = GameMatrix::classic();
  const auto tft = Memory1Policy::tit_for_tat();
  CHECK(discounted_policy_value(Memory1Policy::always_cooperate(), tft, m, 0.9) >
        discounted_policy_value(Memory1Policy::always_defect(), tft, m, 0.9));
}

TEST_CASE("discounted value agrees with truncated summation of a played match") {
  const auto m = GameMatrix::classic();
  const auto policies = all_memory1_policies();
  RandomStream rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& p = policies[rng.uniform_index(32)];
    const auto& q = policies[rng.uniform_index(32)];
    const double gamma = 0.05 * static_cast<double>(rng.uniform_index(19));
    Strategy a = Strategy::memory1(p);
    Strategy b = Strategy::memory1(q);
    const auto r = play_match(a, b, 800, m, rng);
    double value = 0.0;
    double weight = 1.0;
    for (const auto& [x, y] : r.moves) {
      value += weight * payoff(m, x, y).mine;
      weight *= gamma;
    }
    REQUIRE(discounted_policy_value(p, q, m, gamma) == doctest::Approx(value).epsilon(1e-12));
  }
}

TEST_CASE("long-run match average equals the cycle average for every memory-1 pair") {
  const auto m = GameMatrix::classic();
  const auto policies = all_memory1_policies();
  RandomStream rng(5);
  for (const auto& p : policies) {
    for (const auto& q : policies) {
      const JointPlay play = unroll_joint_play(p, q);
      REQUIRE(play.prefix.size() + play.cycle.size() <= 4);
      // Average over whole cycles once the prefix has been played out.
      const std::size_t window = 1000 * play.cycle.size();
      Strategy a = Strategy::memory1(p);
      Strategy b = Strategy::memory1(q);
      const auto r = play_match(a, b, play.prefix.size() + window, m, rng);
      for (std::size_t i = 0; i < play.prefix.size(); ++i) REQUIRE(r.moves[i] == play.prefix[i]);
      double total = 0.0;
      for (std::size_t i = play.prefix.size(); i < r.moves.size(); ++i) {
        total += payoff(m, r.moves[i].first, r.moves[i].second).mine;
      }
      REQUIRE(std::abs(total / static_cast<double>(window) - cycle_average_payoff(p, q, m)) <= 1e-6);
    }
  }
}

TEST_CASE("learner state encoding and greedy policy extraction") {
  CHECK(match_state(std::nullopt) == 0);
  CHECK(match_state(std::pair{C, C}) == 1);
  CHECK(match_state(std::pair{C, D}) == 2);
  CHECK(match_state(std::pair{D, C}) == 3);
  CHECK(match_state(std::pair{D, D}) == 4);

  Strategy learner = Strategy::q_learner({0.5, 0.9, 0.0});
  CHECK(learner.greedy_policy() == Memory1Policy::always_cooperate());  // all-zero ties -> C
  learner.q_table().set(2, 1, 1.0);
  learner.q_table().set(4, 1, 1.0);
  CHECK(learner.greedy_policy() == Memory1Policy::tit_for_tat());
  CHECK(Strategy::grim().greedy_policy() == Memory1Policy::grim());
  CHECK_THROWS_AS(Strategy::grim().q_table(), DomainError);
}

TEST_CASE("a frozen learner does not update") {
  Strategy learner = Strategy::q_learner({0.5, 0.9, 0.5}, false);
  Strategy opponent = Strategy::tit_for_tat();
  RandomStream rng(6);
  play_match(learner, opponent, 50, GameMatrix::classic(), rng);
  CHECK(learner.q_table() == QTable(kMatchStateCount, 2));
}
