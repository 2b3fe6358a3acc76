#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evorl/random.hpp"
#include "evorl/rl.hpp"

namespace evorl {

enum class Move : std::uint8_t { Cooperate = 0, Defect = 1 };

char to_char(Move m) noexcept;

/// Symmetric 2x2 prisoner's-dilemma payoffs. Construction enforces
/// T > R > P > S and 2R > T + S.
class GameMatrix {
 public:
  GameMatrix(double temptation, double reward, double punishment, double sucker);
  /// T=5, R=3, P=1, S=0.
  static GameMatrix classic() { return GameMatrix(5, 3, 1, 0); }

  double temptation() const noexcept { return t_; }
  double reward() const noexcept { return r_; }
  double punishment() const noexcept { return p_; }
  double sucker() const noexcept { return s_; }

  friend bool operator==(const GameMatrix&, const GameMatrix&) = default;

 private:
  double t_, r_, p_, s_;
};

struct PayoffPair {
  double mine;
  double theirs;
  friend bool operator==(const PayoffPair&, const PayoffPair&) = default;
};

PayoffPair payoff(const GameMatrix& matrix, Move mine, Move theirs);

/// Deterministic memory-1 rule: an opening move plus a reply to each
/// (own last, opponent last) pair, indexed 2*own + opponent.
struct Memory1Policy {
  Move first = Move::Cooperate;
  std::array<Move, 4> reply{};

  Move respond(Move own_last, Move opponent_last) const {
    return reply[2 * static_cast<std::size_t>(own_last) + static_cast<std::size_t>(opponent_last)];
  }

  static Memory1Policy always_cooperate();
  static Memory1Policy always_defect();
  static Memory1Policy tit_for_tat();
  /// Cooperates until either side has defected; from C it never returns.
  static Memory1Policy grim();

  friend bool operator==(const Memory1Policy&, const Memory1Policy&) = default;
};

enum class StrategyKind { AllC, AllD, TitForTat, Grim, Memory1, QLearner };

std::string to_string(StrategyKind kind);

/// State index seen by learning players: 0 before the first round, then
/// 1 + 2*own_last + opponent_last.
constexpr std::size_t kMatchStateCount = 5;
std::size_t match_state(std::optional<std::pair<Move, Move>> last_round);

/// A player in the iterated game. Fixed strategies are memory-1 policies;
/// the learner carries a QTable over the five match states.
class Strategy {
 public:
  static Strategy all_cooperate() { return Strategy(StrategyKind::AllC, Memory1Policy::always_cooperate()); }
  static Strategy all_defect() { return Strategy(StrategyKind::AllD, Memory1Policy::always_defect()); }
  static Strategy tit_for_tat() { return Strategy(StrategyKind::TitForTat, Memory1Policy::tit_for_tat()); }
  static Strategy grim() { return Strategy(StrategyKind::Grim, Memory1Policy::grim()); }
  static Strategy memory1(Memory1Policy policy) { return Strategy(StrategyKind::Memory1, policy); }
  /// With `learning` false the table is frozen and play is epsilon-greedy on it.
  static Strategy q_learner(LearningParams params, bool learning = true);

  StrategyKind kind() const noexcept { return kind_; }
  bool is_learner() const noexcept { return kind_ == StrategyKind::QLearner; }

  const QTable& q_table() const;
  QTable& q_table();
  LearningParams& learning_params();
  void set_learning(bool learning) noexcept { learning_ = learning; }

  Move choose(std::optional<std::pair<Move, Move>> last_round, RandomStream& rng) const;
  /// Applies q_update for a learner; no-op for fixed strategies.
  void observe(std::size_t state, Move action, double reward, std::size_t next_state);

  /// The fixed policy, or the learner's greedy memory-1 policy.
  Memory1Policy greedy_policy() const;

 private:
  Strategy(StrategyKind kind, Memory1Policy policy) : kind_(kind), policy_(policy) {}

  StrategyKind kind_;
  Memory1Policy policy_{};
  std::optional<QTable> q_;
  LearningParams params_{};
  bool learning_ = false;
};

struct MatchResult {
  std::vector<std::pair<Move, Move>> moves;
  double score_a = 0.0;
  double score_b = 0.0;
  std::size_t rounds = 0;
};

/// Iterated simultaneous play. Learners update after every round with the
/// round payoff as reward; no round is treated as terminal.
MatchResult play_match(Strategy& a, Strategy& b, std::size_t rounds, const GameMatrix& matrix,
                       RandomStream& rng);

/// Joint play of two deterministic memory-1 policies, split into the move
/// pairs before the repeating cycle and the cycle itself.
struct JointPlay {
  std::vector<std::pair<Move, Move>> prefix;
  std::vector<std::pair<Move, Move>> cycle;
};

JointPlay unroll_joint_play(const Memory1Policy& policy, const Memory1Policy& opponent);

/// Long-run average per-round payoff to `policy`.
double cycle_average_payoff(const Memory1Policy& policy, const Memory1Policy& opponent,
                            const GameMatrix& matrix);

/// Exact discounted value sum_t gamma^t r_t to `policy`, evaluated in rational
/// arithmetic over the shortest decimal form of gamma and the payoffs and
/// rounded once at the end.
double discounted_policy_value(const Memory1Policy& policy, const Memory1Policy& opponent,
                               const GameMatrix& matrix, double gamma);

}  // namespace evorl
