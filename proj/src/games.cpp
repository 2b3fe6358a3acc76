#include "evorl/games.hpp"

#include <algorithm>
#include <cmath>

#include "evorl/errors.hpp"
#include "exact_decimal.hpp"

namespace evorl {

namespace {

using detail::decimal_rational;
using detail::Rational;

void check_payoff(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string("cooperation.matrix.") + name, "must be finite");
}

}  // namespace

char to_char(Move m) noexcept { return m == Move::Cooperate ? 'C' : 'D'; }

GameMatrix::GameMatrix(double temptation, double reward, double punishment, double sucker)
    : t_(temptation), r_(reward), p_(punishment), s_(sucker) {
  check_payoff(t_, "T");
  check_payoff(r_, "R");
  check_payoff(p_, "P");
  check_payoff(s_, "S");
  if (!(t_ > r_ && r_ > p_ && p_ > s_)) {
    throw ConfigError("cooperation.matrix", "payoffs must satisfy T > R > P > S");
  }
  if (!(2.0 * r_ > t_ + s_)) {
    throw ConfigError("cooperation.matrix", "payoffs must satisfy 2R > T + S");
  }
}

PayoffPair payoff(const GameMatrix& m, Move mine, Move theirs) {
  if (mine == Move::Cooperate) {
    return theirs == Move::Cooperate ? PayoffPair{m.reward(), m.reward()}
                                     : PayoffPair{m.sucker(), m.temptation()};
  }
  return theirs == Move::Cooperate ? PayoffPair{m.temptation(), m.sucker()}
                                   : PayoffPair{m.punishment(), m.punishment()};
}

Memory1Policy Memory1Policy::always_cooperate() {
  return {Move::Cooperate, {Move::Cooperate, Move::Cooperate, Move::Cooperate, Move::Cooperate}};
}

Memory1Policy Memory1Policy::always_defect() {
  return {Move::Defect, {Move::Defect, Move::Defect, Move::Defect, Move::Defect}};
}

Memory1Policy Memory1Policy::tit_for_tat() {
  // Copy the opponent's last move.
  return {Move::Cooperate, {Move::Cooperate, Move::Defect, Move::Cooperate, Move::Defect}};
}

Memory1Policy Memory1Policy::grim() {
  return {Move::Cooperate, {Move::Cooperate, Move::Defect, Move::Defect, Move::Defect}};
}

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::AllC: return "all_c";
    case StrategyKind::AllD: return "all_d";
    case StrategyKind::TitForTat: return "tit_for_tat";
    case StrategyKind::Grim: return "grim";
    case StrategyKind::Memory1: return "memory1";
    case StrategyKind::QLearner: return "q_learner";
  }
  return "unknown";
}

std::size_t match_state(std::optional<std::pair<Move, Move>> last_round) {
  if (!last_round) return 0;
  return 1 + 2 * static_cast<std::size_t>(last_round->first) +
         static_cast<std::size_t>(last_round->second);
}

Strategy Strategy::q_learner(LearningParams params, bool learning) {
  params.validate();
  Strategy s(StrategyKind::QLearner, Memory1Policy{});
  s.q_.emplace(kMatchStateCount, 2);
  s.params_ = params;
  s.learning_ = learning;
  return s;
}

const QTable& Strategy::q_table() const {
  if (!q_) throw DomainError("strategy " + to_string(kind_) + " has no Q-table");
  return *q_;
}

QTable& Strategy::q_table() {
  if (!q_) throw DomainError("strategy " + to_string(kind_) + " has no Q-table");
  return *q_;
}

LearningParams& Strategy::learning_params() {
  if (!q_) throw DomainError("strategy " + to_string(kind_) + " has no learning parameters");
  return params_;
}

Move Strategy::choose(std::optional<std::pair<Move, Move>> last_round, RandomStream& rng) const {
  if (q_) {
    return static_cast<Move>(epsilon_greedy_action(*q_, match_state(last_round), params_, rng));
  }
  return last_round ? policy_.respond(last_round->first, last_round->second) : policy_.first;
}

void Strategy::observe(std::size_t state, Move action, double reward, std::size_t next_state) {
  if (!q_ || !learning_) return;
  q_update(*q_, state, static_cast<ActionIndex>(action), reward, next_state, params_);
}

Memory1Policy Strategy::greedy_policy() const {
  if (!q_) return policy_;
  Memory1Policy p;
  p.first = static_cast<Move>(greedy_action(*q_, 0));
  for (std::size_t i = 0; i < 4; ++i) p.reply[i] = static_cast<Move>(greedy_action(*q_, 1 + i));
  return p;
}

MatchResult play_match(Strategy& a, Strategy& b, std::size_t rounds, const GameMatrix& matrix,
                       RandomStream& rng) {
  if (rounds == 0) throw DomainError("play_match: rounds must be >= 1");
  MatchResult result;
  result.rounds = rounds;
  result.moves.reserve(rounds);
  std::optional<std::pair<Move, Move>> last_a;  // (a's move, b's move)
  std::optional<std::pair<Move, Move>> last_b;  // (b's move, a's move)
  for (std::size_t round = 0; round < rounds; ++round) {
    const Move move_a = a.choose(last_a, rng);
    const Move move_b = b.choose(last_b, rng);
    const PayoffPair pay = payoff(matrix, move_a, move_b);
    result.score_a += pay.mine;
    result.score_b += pay.theirs;
    result.moves.emplace_back(move_a, move_b);

    const std::size_t state_a = match_state(last_a);
    const std::size_t state_b = match_state(last_b);
    last_a = std::pair{move_a, move_b};
    last_b = std::pair{move_b, move_a};
    a.observe(state_a, move_a, pay.mine, match_state(last_a));
    b.observe(state_b, move_b, pay.theirs, match_state(last_b));
  }
  return result;
}

JointPlay unroll_joint_play(const Memory1Policy& policy, const Memory1Policy& opponent) {
  std::vector<std::pair<Move, Move>> seen;
  std::pair<Move, Move> current{policy.first, opponent.first};
  // At most four distinct joint states exist, so a repeat appears within five rounds.
  for (;;) {
    const auto it = std::find(seen.begin(), seen.end(), current);
    if (it != seen.end()) {
      JointPlay play;
      play.prefix.assign(seen.begin(), it);
      play.cycle.assign(it, seen.end());
      return play;
    }
    seen.push_back(current);
    current = {policy.respond(current.first, current.second),
               opponent.respond(current.second, current.first)};
  }
}

double cycle_average_payoff(const Memory1Policy& policy, const Memory1Policy& opponent,
                            const GameMatrix& matrix) {
  const JointPlay play = unroll_joint_play(policy, opponent);
  Rational total = 0;
  for (const auto& [mine, theirs] : play.cycle) {
    total += decimal_rational(payoff(matrix, mine, theirs).mine);
  }
  total /= static_cast<long>(play.cycle.size());
  return total.convert_to<double>();
}

double discounted_policy_value(const Memory1Policy& policy, const Memory1Policy& opponent,
                               const GameMatrix& matrix, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw DomainError("discounted_policy_value: gamma must lie in [0, 1)");
  }
  const JointPlay play = unroll_joint_play(policy, opponent);
  const Rational g = decimal_rational(gamma);

  Rational value = 0;
  Rational weight = 1;
  for (const auto& [mine, theirs] : play.prefix) {
    value += weight * decimal_rational(payoff(matrix, mine, theirs).mine);
    weight *= g;
  }
  Rational cycle_sum = 0;
  Rational cycle_weight = 1;
  for (const auto& [mine, theirs] : play.cycle) {
    cycle_sum += cycle_weight * decimal_rational(payoff(matrix, mine, theirs).mine);
    cycle_weight *= g;
  }
  // Geometric series over repetitions of the cycle.
  value += weight * cycle_sum / (Rational(1) - cycle_weight);
  return value.convert_to<double>();
}

}  // namespace evorl
