#include "cutrope/arena.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace cutrope {

namespace {

// Substream salts: the red sample, blue sample, and step draws of one
// episode come from distinct derived streams.
constexpr std::uint64_t kRedStream = 0x52;
constexpr std::uint64_t kBlueStream = 0x42;
constexpr std::uint64_t kStepStream = 0x53;

// Sampling table over a fixed action order.
struct ResolvedPolicy {
  std::vector<double> cumulative;  // running sums of weights, last ~= 1

  std::size_t sample(SplitMix64& rng) const {
    double u = rng.next_double();
    for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
      if (u < cumulative[i]) return i;
    }
    return cumulative.size() - 1;
  }
};

ResolvedPolicy resolve_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) fail(Errc::action_resolution, "policy weights sum to zero");
  ResolvedPolicy out;
  out.cumulative.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] / total;
    out.cumulative[i] = acc;
  }
  return out;
}

// Path labels are matched with or without the "<index>:" column prefix.
std::size_t find_path(const std::vector<AttackPath>& paths, const std::string& label) {
  std::string want = label;
  auto colon = want.find(':');
  if (colon != std::string::npos && want.find_first_not_of("0123456789") == colon) {
    want = want.substr(colon + 1);
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].label() == want) return i;
  }
  fail(Errc::action_resolution, "no enumerated path matches \"" + label + "\"");
}

std::size_t find_node(const std::vector<NodeId>& nodes, const std::string& label) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].str() == label) return i;
  }
  fail(Errc::action_resolution, "no defender action matches \"" + label + "\"");
}

ResolvedPolicy resolve_red(const GameContext& ctx, const Policy& policy) {
  const auto& paths = ctx.paths();
  std::vector<double> weights(paths.size(), 0.0);
  switch (policy.kind) {
    case Policy::Kind::uniform:
      std::fill(weights.begin(), weights.end(), 1.0);
      break;
    case Policy::Kind::pure:
      weights[find_path(paths, policy.action)] = 1.0;
      break;
    case Policy::Kind::equilibrium:
      for (const auto& [label, w] : policy.mix.weights) {
        if (w <= 0.0) continue;
        weights[find_path(paths, label)] += w;
      }
      break;
  }
  return resolve_weights(std::move(weights));
}

ResolvedPolicy resolve_blue(const GameContext& ctx, const Policy& policy) {
  const auto& nodes = ctx.defender_actions();
  std::vector<double> weights(nodes.size(), 0.0);
  switch (policy.kind) {
    case Policy::Kind::uniform:
      std::fill(weights.begin(), weights.end(), 1.0);
      break;
    case Policy::Kind::pure:
      weights[find_node(nodes, policy.action)] = 1.0;
      break;
    case Policy::Kind::equilibrium:
      for (const auto& [label, w] : policy.mix.weights) {
        if (w <= 0.0) continue;
        weights[find_node(nodes, label)] += w;
      }
      break;
  }
  return resolve_weights(std::move(weights));
}

struct EpisodeCore {
  bool attacker_won;
  int rounds_used;
};

// The sampled counterpart of the success_probability dynamic program.
EpisodeCore play_rounds(const AttackPath& path, const NodeId& inspected,
                        const CtrParams& params, const StepDistribution& steps,
                        SplitMix64& rng) {
  const int m = static_cast<int>(path.nodes.size());
  int cut = -1;
  for (int i = 1; i + 1 < m; ++i) {
    if (path.nodes[static_cast<std::size_t>(i)] == inspected) {
      cut = i;
      break;
    }
  }

  int pos = 0;
  for (int round = 1; round <= params.horizon; ++round) {
    int step = steps.sample(rng);
    int landed = std::min(pos + step, m - 1);
    if (landed == m - 1) return {true, round};  // absorbed before inspection
    pos = (cut >= 1 && landed >= cut) ? 0 : landed;
  }
  return {false, params.horizon};
}

EpisodeOutcome run_episode(const GameContext& ctx, const Policy& red, const Policy& blue,
                           const ResolvedPolicy& red_table, const ResolvedPolicy& blue_table,
                           std::uint64_t seed) {
  SplitMix64 red_rng(derive_seed(seed, kRedStream, red.rng_stream));
  SplitMix64 blue_rng(derive_seed(seed, kBlueStream, blue.rng_stream));
  SplitMix64 step_rng(derive_seed(seed, kStepStream, 0));

  std::size_t path_idx = red_table.sample(red_rng);
  std::size_t node_idx = blue_table.sample(blue_rng);
  const AttackPath& path = ctx.paths()[path_idx];
  const NodeId& node = ctx.defender_actions()[node_idx];

  EpisodeCore core = play_rounds(path, node, ctx.params(), ctx.steps(), step_rng);
  return {core.attacker_won, core.rounds_used, path, node, seed};
}

TournamentMetrics finalize_metrics(std::size_t episodes, std::uint64_t wins,
                                   std::uint64_t rounds_sum, std::uint64_t rounds_sq_sum) {
  TournamentMetrics m;
  m.episodes = episodes;
  m.wins = wins;
  m.rounds_sum = rounds_sum;
  m.rounds_sq_sum = rounds_sq_sum;
  double n = static_cast<double>(episodes);
  double p = static_cast<double>(wins) / n;
  m.success_rate = p;
  m.success_variance = p * (1.0 - p);
  double mean_rounds = static_cast<double>(rounds_sum) / n;
  m.rounds_variance = static_cast<double>(rounds_sq_sum) / n - mean_rounds * mean_rounds;
  if (m.rounds_variance < 0.0) m.rounds_variance = 0.0;  // fp guard
  double half = 1.96 * std::sqrt(p * (1.0 - p) / n);
  m.ci95 = {std::max(0.0, p - half), std::min(1.0, p + half)};
  return m;
}

}  // namespace

Policy Policy::uniform() { return {}; }

Policy Policy::pure(std::string action) {
  Policy p;
  p.kind = Kind::pure;
  p.action = std::move(action);
  return p;
}

Policy Policy::equilibrium(MixedStrategy mix) {
  Policy p;
  p.kind = Kind::equilibrium;
  p.mix = std::move(mix);
  return p;
}

std::string Policy::describe() const {
  switch (kind) {
    case Kind::uniform: return "uniform";
    case Kind::pure: return "pure:" + action;
    case Kind::equilibrium: return "equilibrium";
  }
  return "uniform";
}

GameContext::GameContext(const AttackGraph& g, const CtrParams& params, std::size_t max_paths)
    : graph_(&g), params_(params), steps_(params.move_rate, params.tail_cutoff) {
  params_.check();
  PathEnumeration enumeration = enumerate_paths(g, max_paths);
  paths_ = std::move(enumeration.paths);
  truncated_ = enumeration.truncated;
  for (const Node& n : g.nodes()) {
    if (n.id != g.entry()) defender_actions_.push_back(n.id);
  }
}

EpisodeOutcome simulate_episode(const GameContext& context, const Policy& red,
                                const Policy& blue, std::uint64_t seed) {
  ResolvedPolicy red_table = resolve_red(context, red);
  ResolvedPolicy blue_table = resolve_blue(context, blue);
  return run_episode(context, red, blue, red_table, blue_table, seed);
}

EpisodeOutcome simulate_episode(const AttackGraph& g, const CtrParams& params,
                                const Policy& red, const Policy& blue, std::uint64_t seed) {
  GameContext context(g, params);
  return simulate_episode(context, red, blue, seed);
}

std::vector<TournamentMetrics> run_tournament(const AttackGraph& g, const CtrParams& params,
                                              const std::vector<Matchup>& matchups,
                                              std::size_t episodes_per_matchup,
                                              std::uint64_t master_seed, unsigned threads,
                                              std::size_t max_paths) {
  if (episodes_per_matchup < 1) fail(Errc::config, "episodes_per_matchup must be at least 1");
  GameContext context(g, params, max_paths);

  std::vector<TournamentMetrics> results;
  results.reserve(matchups.size());
  for (std::size_t mi = 0; mi < matchups.size(); ++mi) {
    const Matchup& matchup = matchups[mi];
    ResolvedPolicy red_table = resolve_red(context, matchup.red);
    ResolvedPolicy blue_table = resolve_blue(context, matchup.blue);

    struct Tally {
      std::uint64_t wins = 0, rounds = 0, rounds_sq = 0;
    };
    auto run_range = [&](std::size_t begin, std::size_t end, Tally& tally) {
      for (std::size_t ei = begin; ei < end; ++ei) {
        std::uint64_t seed = derive_seed(master_seed, mi, ei);
        EpisodeOutcome outcome =
            run_episode(context, matchup.red, matchup.blue, red_table, blue_table, seed);
        tally.wins += outcome.attacker_won ? 1 : 0;
        std::uint64_t r = static_cast<std::uint64_t>(outcome.rounds_used);
        tally.rounds += r;
        tally.rounds_sq += r * r;
      }
    };

    unsigned n_workers = std::max(1u, threads);
    Tally total;
    if (n_workers == 1) {
      run_range(0, episodes_per_matchup, total);
    } else {
      // Integer tallies merge exactly, so any split gives the 1-thread bytes.
      std::vector<Tally> tallies(n_workers);
      std::vector<std::thread> workers;
      workers.reserve(n_workers);
      std::size_t chunk = (episodes_per_matchup + n_workers - 1) / n_workers;
      for (unsigned w = 0; w < n_workers; ++w) {
        std::size_t begin = std::min<std::size_t>(w * chunk, episodes_per_matchup);
        std::size_t end = std::min<std::size_t>(begin + chunk, episodes_per_matchup);
        workers.emplace_back(run_range, begin, end, std::ref(tallies[w]));
      }
      for (auto& t : workers) t.join();
      for (const Tally& t : tallies) {
        total.wins += t.wins;
        total.rounds += t.rounds;
        total.rounds_sq += t.rounds_sq;
      }
    }
    results.push_back(finalize_metrics(episodes_per_matchup, total.wins, total.rounds, total.rounds_sq));
  }
  return results;
}

}  // namespace cutrope
