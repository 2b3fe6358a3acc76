#include "evorl/rl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evorl/errors.hpp"

namespace evorl {

QTable::QTable(std::size_t state_count, std::size_t action_count)
    : states_(state_count), actions_(action_count), values_(state_count * action_count, 0.0) {
  if (state_count == 0 || action_count == 0) {
    throw DomainError("QTable: state and action counts must be positive");
  }
}

void QTable::check(StateIndex s, ActionIndex a) const {
  if (s >= states_) throw DomainError("QTable: state " + std::to_string(s) + " out of range");
  if (a >= actions_) throw DomainError("QTable: action " + std::to_string(a) + " out of range");
}

double QTable::at(StateIndex s, ActionIndex a) const {
  check(s, a);
  return (*this)(s, a);
}

void QTable::set(StateIndex s, ActionIndex a, double value) {
  check(s, a);
  if (!std::isfinite(value)) throw DomainError("QTable: entries must be finite");
  values_[s * actions_ + a] = value;
}

double QTable::max_value(StateIndex s) const {
  check(s, 0);
  const auto row = values_.begin() + static_cast<std::ptrdiff_t>(s * actions_);
  return *std::max_element(row, row + static_cast<std::ptrdiff_t>(actions_));
}

void LearningParams::validate() const {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0) {
    throw ConfigError("learning.alpha", "must lie in (0, 1]");
  }
  if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0) {
    throw ConfigError("learning.gamma", "must lie in [0, 1)");
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon > 1.0) {
    throw ConfigError("learning.epsilon", "must lie in [0, 1]");
  }
}

TabularMdp::TabularMdp(std::vector<std::vector<Edge>> edges, std::vector<StateIndex> start_states)
    : edges_(std::move(edges)), starts_(std::move(start_states)) {
  if (edges_.empty() || edges_.front().empty()) {
    throw DomainError("TabularMdp: need at least one state and one action");
  }
  if (starts_.empty()) throw DomainError("TabularMdp: need at least one start state");
  const std::size_t actions = edges_.front().size();
  for (const auto& row : edges_) {
    if (row.size() != actions) throw DomainError("TabularMdp: ragged action sets");
    for (const auto& e : row) {
      if (e.next_state >= edges_.size()) throw DomainError("TabularMdp: next state out of range");
      if (!std::isfinite(e.reward)) throw DomainError("TabularMdp: rewards must be finite");
    }
  }
  for (const auto s : starts_) {
    if (s >= edges_.size()) throw DomainError("TabularMdp: start state out of range");
  }
}

StateIndex TabularMdp::reset(RandomStream& rng) {
  if (starts_.size() == 1) return starts_.front();
  return starts_[rng.uniform_index(starts_.size())];
}

Transition TabularMdp::transition(StateIndex s, ActionIndex a, RandomStream&) {
  const Edge& e = edge(s, a);
  return {e.next_state, e.reward, e.terminal};
}

BernoulliBandit::BernoulliBandit(std::vector<double> success_probability, std::vector<double> scale)
    : p_(std::move(success_probability)), scale_(std::move(scale)) {
  if (p_.empty()) throw DomainError("BernoulliBandit: need at least one arm");
  if (scale_.empty()) scale_.assign(p_.size(), 1.0);
  if (scale_.size() != p_.size()) throw DomainError("BernoulliBandit: scale/arm count mismatch");
  for (const double p : p_) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("BernoulliBandit: probability outside [0, 1]");
  }
}

Transition BernoulliBandit::transition(StateIndex s, ActionIndex a, RandomStream& rng) {
  if (s != 0 || a >= p_.size()) throw DomainError("BernoulliBandit: index out of range");
  return {0, rng.bernoulli(p_[a]) ? scale_[a] : 0.0, true};
}

void q_update(QTable& q, StateIndex s, ActionIndex a, double reward, StateIndex s_next,
              const LearningParams& params, bool terminal) {
  if (!std::isfinite(reward)) throw DomainError("q_update: reward must be finite");
  if (s_next >= q.state_count()) throw DomainError("q_update: next state out of range");
  const double current = q.at(s, a);
  const double future = terminal ? 0.0 : q.max_value(s_next);
  const double alpha = params.alpha;
  q.set(s, a, (1.0 - alpha) * current + alpha * (reward + params.gamma * future));
}

ActionIndex greedy_action(const QTable& q, StateIndex s) {
  ActionIndex best = 0;
  double best_value = q.at(s, 0);
  for (ActionIndex a = 1; a < q.action_count(); ++a) {
    if (q(s, a) > best_value) {
      best = a;
      best_value = q(s, a);
    }
  }
  return best;
}

ActionIndex epsilon_greedy_action(const QTable& q, StateIndex s, const LearningParams& params,
                                  RandomStream& rng) {
  if (rng.uniform01() < params.epsilon) return rng.uniform_index(q.action_count());
  return greedy_action(q, s);
}

double estimate_reward(Environment& env, StateIndex s, ActionIndex a, std::size_t n,
                       RandomStream& rng) {
  if (n == 0) throw DomainError("estimate_reward: sample count must be >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += env.transition(s, a, rng).reward;
  return total / static_cast<double>(n);
}

TrainingResult train(Environment& env, const LearningParams& params, std::size_t episodes,
                     std::size_t max_steps, RandomStream& rng) {
  // alpha = 0 is allowed here: it freezes the table.
  if (params.alpha == 0.0) {
    LearningParams rest = params;
    rest.alpha = 1.0;
    rest.validate();
  } else {
    params.validate();
  }
  if (episodes == 0) throw DomainError("train: episodes must be >= 1");
  if (max_steps == 0) throw DomainError("train: max_steps must be >= 1");

  TrainingResult result{QTable(env.state_count(), env.action_count()), {}};
  result.episode_returns.reserve(episodes);
  for (std::size_t episode = 0; episode < episodes; ++episode) {
    double episode_return = 0.0;
    std::size_t step = 0;
    try {
      StateIndex s = env.reset(rng);
      for (; step < max_steps; ++step) {
        const ActionIndex a = epsilon_greedy_action(result.q, s, params, rng);
        const Transition t = env.transition(s, a, rng);
        if (t.next_state >= env.state_count()) {
          throw DomainError("next state " + std::to_string(t.next_state) + " out of range");
        }
        if (!std::isfinite(t.reward)) throw DomainError("non-finite reward");
        q_update(result.q, s, a, t.reward, t.next_state, params, t.terminal);
        episode_return += t.reward;
        if (t.terminal) break;
        s = t.next_state;
      }
    } catch (const std::exception& e) {
      throw EnvironmentError("episode " + std::to_string(episode) + ", step " +
                             std::to_string(step) + ": " + e.what());
    }
    result.episode_returns.push_back(episode_return);
  }
  return result;
}

}  // namespace evorl
