#pragma once

#include <cstddef>
#include <vector>

#include "evorl/random.hpp"

namespace evorl {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Dense state-action value table. Shape is fixed at construction and every
/// entry starts at zero.
class QTable {
 public:
  QTable(std::size_t state_count, std::size_t action_count);

  std::size_t state_count() const noexcept { return states_; }
  std::size_t action_count() const noexcept { return actions_; }

  double operator()(StateIndex s, ActionIndex a) const { return values_[s * actions_ + a]; }
  double at(StateIndex s, ActionIndex a) const;
  void set(StateIndex s, ActionIndex a, double value);
  double max_value(StateIndex s) const;
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  void check(StateIndex s, ActionIndex a) const;

  std::size_t states_;
  std::size_t actions_;
  std::vector<double> values_;
};

struct LearningParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;

  /// Config-level check: alpha in (0, 1], gamma in [0, 1), epsilon in [0, 1].
  /// Throws ConfigError naming "learning.alpha" etc. The update rule and
  /// `train` additionally accept alpha = 0, which freezes the table.
  void validate() const;

  friend bool operator==(const LearningParams&, const LearningParams&) = default;
};

struct Transition {
  StateIndex next_state = 0;
  double reward = 0.0;
  bool terminal = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Episodic environment. `reset` may use the stream to pick a start state.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t state_count() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual StateIndex reset(RandomStream& rng) = 0;
  virtual Transition transition(StateIndex s, ActionIndex a, RandomStream& rng) = 0;
};

/// Deterministic finite MDP given by explicit next-state/reward/terminal tables.
/// Episodes start from a uniformly drawn entry of `start_states`.
class TabularMdp final : public Environment {
 public:
  struct Edge {
    StateIndex next_state;
    double reward;
    bool terminal = false;
  };

  /// edges[s][a]; every state must offer the same number of actions.
  TabularMdp(std::vector<std::vector<Edge>> edges, std::vector<StateIndex> start_states);

  std::size_t state_count() const override { return edges_.size(); }
  std::size_t action_count() const override { return edges_.front().size(); }
  StateIndex reset(RandomStream& rng) override;
  Transition transition(StateIndex s, ActionIndex a, RandomStream& rng) override;

  const Edge& edge(StateIndex s, ActionIndex a) const { return edges_.at(s).at(a); }

 private:
  std::vector<std::vector<Edge>> edges_;
  std::vector<StateIndex> starts_;
};

/// Single-state environment whose reward for action a is Bernoulli(p[a]) scaled
/// by `scale[a]`; every transition is terminal.
class BernoulliBandit final : public Environment {
 public:
  explicit BernoulliBandit(std::vector<double> success_probability,
                           std::vector<double> scale = {});

  std::size_t state_count() const override { return 1; }
  std::size_t action_count() const override { return p_.size(); }
  StateIndex reset(RandomStream&) override { return 0; }
  Transition transition(StateIndex s, ActionIndex a, RandomStream& rng) override;

 private:
  std::vector<double> p_;
  std::vector<double> scale_;
};

/// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (R + gamma max_a' Q(s',a')).
/// Terminal transitions bootstrap with a max term of 0. Only (s,a) is written.
void q_update(QTable& q, StateIndex s, ActionIndex a, double reward, StateIndex s_next,
              const LearningParams& params, bool terminal = false);

/// argmax_a Q(s,a); ties go to the lowest action index.
ActionIndex greedy_action(const QTable& q, StateIndex s);

/// Draws one uniform for the explore/exploit branch and, only when exploring,
/// one uniform action index.
ActionIndex epsilon_greedy_action(const QTable& q, StateIndex s, const LearningParams& params,
                                  RandomStream& rng);

/// Monte-Carlo mean of n rewards from env.transition(s, a).
double estimate_reward(Environment& env, StateIndex s, ActionIndex a, std::size_t n,
                       RandomStream& rng);

struct TrainingResult {
  QTable q;
  std::vector<double> episode_returns;
};

/// Episodic epsilon-greedy Q-learning from an all-zero table. Returns are
/// undiscounted sums of rewards per episode. Environment faults are rethrown
/// as EnvironmentError prefixed with the episode and step.
TrainingResult train(Environment& env, const LearningParams& params, std::size_t episodes,
                     std::size_t max_steps, RandomStream& rng);

}  // namespace evorl
