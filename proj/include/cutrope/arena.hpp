#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cutrope/ctr.hpp"
#include "cutrope/graph.hpp"
#include "cutrope/nash.hpp"

namespace cutrope {

// Per-side strategy descriptor for the simulator. Equilibrium policies
// sample exactly from the stored mixed strategy; rng_stream separates the
// policy's sampling substream from the opponent's.
struct Policy {
  enum class Kind { uniform, pure, equilibrium };

  Kind kind = Kind::uniform;
  std::string action;  // pure: node id (blue) or path label (red)
  MixedStrategy mix;   // equilibrium: one side of a solved game
  std::uint64_t rng_stream = 0;

  static Policy uniform();
  static Policy pure(std::string action);
  static Policy equilibrium(MixedStrategy mix);

  std::string describe() const;  // "uniform", "pure:2", "equilibrium"
};

struct EpisodeOutcome {
  bool attacker_won = false;
  int rounds_used = 0;  // round of absorption, or the full horizon
  AttackPath path_chosen;
  NodeId node_inspected;
  std::uint64_t seed = 0;
};

// Shared battlefield, precomputed once per (graph, params): the complete
// attacker paths in enumeration order, the defender's inspectable nodes
// (every non-entry node, id order), and the step distribution.
class GameContext {
public:
  GameContext(const AttackGraph& g, const CtrParams& params,
              std::size_t max_paths = kDefaultMaxPaths);

  const AttackGraph& graph() const { return *graph_; }
  const CtrParams& params() const { return params_; }
  const std::vector<AttackPath>& paths() const { return paths_; }
  const std::vector<NodeId>& defender_actions() const { return defender_actions_; }
  const StepDistribution& steps() const { return steps_; }
  bool paths_truncated() const { return truncated_; }

private:
  const AttackGraph* graph_;
  CtrParams params_;
  std::vector<AttackPath> paths_;
  std::vector<NodeId> defender_actions_;
  StepDistribution steps_;
  bool truncated_;
};

// One play-through: red commits to a path and blue to a node, then the
// kernel runs with stochastic semantics identical to success_probability
// (same step distribution, same reset rule, same horizon). Reproducible
// from (graph, params, policies, seed) alone.
EpisodeOutcome simulate_episode(const GameContext& context, const Policy& red,
                                const Policy& blue, std::uint64_t seed);
EpisodeOutcome simulate_episode(const AttackGraph& g, const CtrParams& params,
                                const Policy& red, const Policy& blue,
                                std::uint64_t seed);

struct TournamentMetrics {
  std::size_t episodes = 0;
  double success_rate = 0.0;
  double success_variance = 0.0;  // Bernoulli sample variance of attacker_won
  double rounds_variance = 0.0;   // sample variance of rounds_used
  std::pair<double, double> ci95{0.0, 0.0};

  // Exact integer tallies; merging them is associative and order
  // independent, which keeps parallel runs bit-identical.
  std::uint64_t wins = 0;
  std::uint64_t rounds_sum = 0;
  std::uint64_t rounds_sq_sum = 0;
};

struct Matchup {
  Policy red;
  Policy blue;
};

// Runs every matchup for episodes_per_matchup episodes. Episode seeds come
// from derive_seed(master_seed, matchup index, episode index), so results do
// not depend on execution order or thread count.
std::vector<TournamentMetrics> run_tournament(const AttackGraph& g,
                                              const CtrParams& params,
                                              const std::vector<Matchup>& matchups,
                                              std::size_t episodes_per_matchup,
                                              std::uint64_t master_seed,
                                              unsigned threads = 1,
                                              std::size_t max_paths = kDefaultMaxPaths);

}  // namespace cutrope
