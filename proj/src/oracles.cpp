#include "evorl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evorl/core.hpp"
#include "evorl/dynamics.hpp"
#include "evorl/errors.hpp"
#include "evorl/games.hpp"
#include "evorl/harness.hpp"
#include "evorl/random.hpp"

namespace evorl::oracles {

namespace {

using Edge = TabularMdp::Edge;

OracleCheck within(std::string name, double observed, double expected, double tolerance) {
  return {std::move(name), observed, expected, tolerance,
          std::abs(observed - expected) <= tolerance};
}

OracleCheck above(std::string name, double observed, double threshold) {
  return {std::move(name), observed, threshold, 0.0, observed > threshold};
}

// Grid of rows x cols; actions up, down, left, right. Entering `goal` ends the
// episode with `goal_reward`, every other move costs `step_reward`. The goal
// itself is absorbing with zero reward.
TabularMdp grid(std::size_t rows, std::size_t cols, std::size_t goal, double goal_reward,
                double step_reward) {
  std::vector<std::vector<Edge>> edges(rows * cols);
  std::vector<StateIndex> starts;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t s = r * cols + c;
      const std::size_t targets[4] = {r > 0 ? s - cols : s, r + 1 < rows ? s + cols : s,
                                      c > 0 ? s - 1 : s, c + 1 < cols ? s + 1 : s};
      for (const std::size_t t : targets) {
        if (s == goal) {
          edges[s].push_back({s, 0.0, true});
          continue;
        }
        const bool at_goal = t == goal;
        edges[s].push_back({t, at_goal ? goal_reward : step_reward, at_goal});
      }
      if (s != goal) starts.push_back(s);
    }
  }
  return TabularMdp(std::move(edges), std::move(starts));
}

}  // namespace

ValueIterationResult value_iteration(const TabularMdp& mdp, double gamma, double tolerance,
                                     std::size_t max_iterations) {
  const std::size_t ns = mdp.state_count();
  const std::size_t na = mdp.action_count();
  std::vector<std::vector<double>> q(ns, std::vector<double>(na, 0.0));
  ValueIterationResult result;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    std::vector<double> v(ns);
    for (std::size_t s = 0; s < ns; ++s) v[s] = *std::max_element(q[s].begin(), q[s].end());
    double change = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        const Edge& e = mdp.edge(s, a);
        const double target = e.reward + (e.terminal ? 0.0 : gamma * v[e.next_state]);
        change = std::max(change, std::abs(target - q[s][a]));
        q[s][a] = target;
      }
    }
    result.iterations = it;
    result.final_change = change;
    if (change < tolerance) break;
  }
  result.q = std::move(q);
  return result;
}

double sup_norm_distance(const QTable& q, const std::vector<std::vector<double>>& reference) {
  double worst = 0.0;
  for (std::size_t s = 0; s < q.state_count(); ++s) {
    for (std::size_t a = 0; a < q.action_count(); ++a) {
      worst = std::max(worst, std::abs(q(s, a) - reference.at(s).at(a)));
    }
  }
  return worst;
}

std::vector<NamedMdp> reference_mdps() {
  std::vector<NamedMdp> mdps;
  // Action 0 stays, action 1 switches; staying in state 1 pays 1, switching
  // from 1 back to 0 pays 0.5.
  mdps.push_back({"two_state_chain",
                  TabularMdp({{{0, 0.0}, {1, 0.0}}, {{1, 1.0}, {0, 0.5}}}, {0, 1}), 0.9});

  // Corridor of five cells; stepping right from cell 3 reaches the exit.
  {
    std::vector<std::vector<Edge>> edges(5);
    for (std::size_t s = 0; s < 4; ++s) {
      const std::size_t left = s == 0 ? 0 : s - 1;
      const std::size_t right = std::min<std::size_t>(s + 1, 4);
      edges[s] = {{left, -0.1, false}, {right, right == 4 ? 1.0 : -0.1, right == 4}};
    }
    edges[4] = {{4, 0.0, true}, {4, 0.0, true}};
    mdps.push_back({"corridor", TabularMdp(std::move(edges), {0, 1, 2, 3}), 0.9});
  }

  mdps.push_back({"grid_2x3", grid(2, 3, 5, 10.0, -1.0), 0.95});

  // Eight-state ring: advance (bonus on wrap-around), rest, or bail out to 0.
  {
    std::vector<std::vector<Edge>> edges(8);
    std::vector<StateIndex> starts;
    for (std::size_t s = 0; s < 8; ++s) {
      edges[s] = {{(s + 1) % 8, s == 7 ? 2.0 : 0.0, false}, {s, 0.1, false}, {0, 0.5, false}};
      starts.push_back(s);
    }
    mdps.push_back({"ring_with_bailout", TabularMdp(std::move(edges), std::move(starts)), 0.8});
  }

  // From 0 choose a short branch paying 1 now or a long branch paying 5 at the end.
  {
    std::vector<std::vector<Edge>> edges = {
        {{1, 1.0, false}, {4, 0.0, false}},
        {{2, 0.0, false}, {2, 0.0, false}},
        {{3, 0.2, true}, {3, 0.2, true}},
        {{3, 0.0, true}, {3, 0.0, true}},
        {{5, 0.0, false}, {0, 0.0, false}},
        {{6, 0.0, false}, {4, 0.0, false}},
        {{3, 5.0, true}, {5, 0.0, false}},
    };
    mdps.push_back({"two_branch", TabularMdp(std::move(edges), {0, 1, 2, 4, 5, 6}), 0.9});
  }

  mdps.push_back(
      {"deterministic_bandit", TabularMdp({{{0, 0.2, true}, {0, 0.5, true}, {0, 0.1, true}}}, {0}),
       0.5});
  return mdps;
}

std::vector<OracleCheck> run_all() {
  std::vector<OracleCheck> checks;
  const RandomStreamTree tree(20240601);

  {
    RandomStream rng = tree.stream("bernoulli_landscape", 0);
    RandomStream replay = tree.stream("bernoulli_landscape", 0);
    const auto land = FitnessLandscape::bernoulli([](const Genotype&) { return 0.5; });
    const Genotype g{1, 0};
    const FitnessEstimate est = estimate_expected_fitness(g, land, 10000, rng);
    double hits = 0.0;
    for (int i = 0; i < 10000; ++i) hits += replay.uniform01() < 0.5 ? 1.0 : 0.0;
    checks.push_back(within("estimate_expected_fitness Bernoulli(0.5) n=10000", est.mean, 0.5, 0.015));
    checks.push_back(within("estimate_expected_fitness matches brute-force redraw", est.mean,
                            hits / 10000.0, 0.0));
  }
  {
    RandomStream rng = tree.stream("survival_trial", 0);
    const auto land = FitnessLandscape::constant(0.3);
    const Individual ind{Genotype{0}, 0, true};
    double live = 0.0;
    for (int i = 0; i < 100000; ++i) live += survival_trial(ind, land, rng).alive ? 1.0 : 0.0;
    checks.push_back(within("survival_trial p=0.3 live frequency", live / 1e5, 0.3, 0.005));
  }
  {
    RandomStream rng = tree.stream("mutate", 0);
    const Genotype g(100);
    double flips = 0.0;
    for (int i = 0; i < 10000; ++i) flips += static_cast<double>(mutate(g, 0.01, rng).count_ones());
    checks.push_back(within("mutate mu=0.01 L=100 mean flips", flips / 1e4, 1.0, 0.05));
  }
  {
    RandomStream rng = tree.stream("epsilon_greedy", 0);
    QTable q(1, 2);
    q.set(0, 1, 1.0);
    const LearningParams explore{0.5, 0.0, 1.0};
    const LearningParams mostly_greedy{0.5, 0.0, 0.1};
    double ones_explore = 0.0;
    double ones_greedy = 0.0;
    for (int i = 0; i < 100000; ++i) {
      ones_explore += static_cast<double>(epsilon_greedy_action(q, 0, explore, rng));
    }
    for (int i = 0; i < 100000; ++i) {
      ones_greedy += static_cast<double>(epsilon_greedy_action(q, 0, mostly_greedy, rng));
    }
    checks.push_back(within("epsilon_greedy eps=1 action-1 frequency", ones_explore / 1e5, 0.5, 0.01));
    checks.push_back(within("epsilon_greedy eps=0.1 action-1 frequency", ones_greedy / 1e5,
                            1.0 - 0.1 + 0.1 / 2.0, 0.005));
  }
  {
    RandomStream rng = tree.stream("estimate_reward", 0);
    BernoulliBandit env({0.25});
    checks.push_back(within("estimate_reward Bernoulli(0.25) n=40000",
                            estimate_reward(env, 0, 0, 40000, rng), 0.25, 0.01));
  }
  {
    RandomStream rng = tree.stream("bandit_training", 0);
    TabularMdp bandit({{{0, 0.0, true}, {0, 1.0, true}}}, {0});
    const TrainingResult trained = train(bandit, {0.5, 0.0, 0.2}, 500, 1, rng);
    checks.push_back(within("train bandit greedy action", static_cast<double>(greedy_action(trained.q, 0)),
                            1.0, 0.0));
  }
  for (const auto& [name, mdp, gamma] : reference_mdps()) {
    TabularMdp env = mdp;
    RandomStream rng = tree.stream("q_learning_" + name, 0);
    const ValueIterationResult vi = value_iteration(mdp, gamma);
    const TrainingResult trained = train(env, {0.5, gamma, 1.0}, 4000, 50, rng);
    checks.push_back(within("Q-learning vs value iteration: " + name,
                            sup_norm_distance(trained.q, vi.q), 0.0, 1e-3));
  }
  {
    // Allele 1 survives with 0.9, allele 0 with 0.5.
    const auto land = FitnessLandscape::deterministic(
        [](const Genotype& g) { return g[0] == 1 ? 0.9 : 0.5; });
    const EvolutionConfig cfg{200, 0.0, 1, 20, ReproductionWeighting::Landscape};
    double total = 0.0;
    for (std::size_t rep = 0; rep < 200; ++rep) {
      RandomStream rng = tree.stream("selection_response", rep);
      std::vector<Genotype> genotypes(200, Genotype{0});
      for (std::size_t i = 0; i < 100; ++i) genotypes[i] = Genotype{1};
      Population pop = Population::from_genotypes(genotypes);
      for (std::size_t g = 0; g < cfg.generations; ++g) {
        GenerationStep step = step_generation(pop, land, cfg, rng);
        if (step.extinct()) break;
        pop = std::move(step.offspring);
      }
      total += pop.empty() ? 0.0 : allele_frequency(pop, 0);
    }
    checks.push_back(above("selection response mean allele-1 frequency after 20 generations",
                           total / 200.0, 0.7));
  }
  {
    const auto tft = Memory1Policy::tit_for_tat();
    const auto matrix = GameMatrix::classic();
    checks.push_back(within("discounted value AllC vs TFT gamma=0.9",
                            discounted_policy_value(Memory1Policy::always_cooperate(), tft, matrix, 0.9),
                            30.0, 0.0));
    checks.push_back(within("discounted value AllD vs TFT gamma=0.9",
                            discounted_policy_value(Memory1Policy::always_defect(), tft, matrix, 0.9),
                            14.0, 0.0));
  }
  {
    TrajectorySet set{"step", {"x"}, {}};
    for (std::size_t rep = 0; rep < 500; ++rep) {
      RandomStream rng = tree.stream("summary_bernoulli", rep);
      set.replicates.push_back({rep, {{rng.bernoulli(0.3) ? 1.0 : 0.0}}, std::nullopt, std::nullopt});
    }
    checks.push_back(within("summarize 500 Bernoulli(0.3) replicates",
                            summarize(set).rows.front().mean.front(), 0.3, 0.06));
  }
  return checks;
}

}  // namespace evorl::oracles
