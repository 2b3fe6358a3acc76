#pragma once

#include <string>
#include <vector>

#include "evorl/rl.hpp"

namespace evorl::oracles {

/// Optimal action values of a deterministic TabularMdp by synchronous value
/// iteration, iterated until the sup-norm change drops below `tolerance`.
struct ValueIterationResult {
  std::vector<std::vector<double>> q;
  std::size_t iterations = 0;
  double final_change = 0.0;
};

ValueIterationResult value_iteration(const TabularMdp& mdp, double gamma,
                                     double tolerance = 1e-12,
                                     std::size_t max_iterations = 1'000'000);

double sup_norm_distance(const QTable& q, const std::vector<std::vector<double>>& reference);

/// The deterministic MDPs used for Q-learning oracle checks: chains, a
/// gridworld corridor, a cycle with a trap and a two-branch choice.
struct NamedMdp {
  std::string name;
  TabularMdp mdp;
  double gamma;
};

std::vector<NamedMdp> reference_mdps();

struct OracleCheck {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Independent Monte-Carlo, closed-form and dynamic-programming checks of the
/// engine's stochastic and learned values.
std::vector<OracleCheck> run_all();

}  // namespace evorl::oracles
