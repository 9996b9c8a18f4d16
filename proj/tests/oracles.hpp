// Independent test oracles. Everything here recomputes expected values from
// first principles and must stay decoupled from the library code paths it
// checks (brute-force enumeration, Monte Carlo with its own sampler, support
// enumeration for 2x2 games, recursive path counting).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "cutrope/ctr.hpp"
#include "cutrope/graph.hpp"

namespace oracles {

// ---- kernel oracles -------------------------------------------------------

// One sampled play-through of the round rules, written independently of the
// library: advance by `step`, clamp at the last node, absorb before
// inspection, reset to the start when the inspected index was traversed.
inline bool play_episode_rules(int path_len, int cut_index, int horizon,
                               const std::vector<int>& steps_per_round) {
  int pos = 0;
  for (int round = 0; round < horizon; ++round) {
    int landed = pos + steps_per_round[static_cast<std::size_t>(round)];
    if (landed >= path_len - 1) return true;
    pos = (cut_index >= 1 && landed >= cut_index) ? 0 : landed;
  }
  return false;
}

// Exact success probability by exhaustive enumeration over per-round step
// tuples, with raw (untruncated up to `max_step`) Poisson weights.
inline double brute_force_success(int path_len, int cut_index, double rate,
                                  int horizon, int max_step = 48) {
  std::vector<double> pois(static_cast<std::size_t>(max_step) + 1);
  double p = std::exp(-rate);
  for (int n = 0; n <= max_step; ++n) {
    if (n > 0) p *= rate / n;
    pois[static_cast<std::size_t>(n)] = p;
  }

  double total = 0.0;
  std::vector<int> steps(static_cast<std::size_t>(horizon), 0);
  // Odometer over all (N_1, ..., N_horizon) tuples.
  for (;;) {
    double weight = 1.0;
    for (int r = 0; r < horizon; ++r) weight *= pois[static_cast<std::size_t>(steps[static_cast<std::size_t>(r)])];
    if (play_episode_rules(path_len, cut_index, horizon, steps)) total += weight;

    int pos = 0;
    while (pos < horizon && steps[static_cast<std::size_t>(pos)] == max_step) {
      steps[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == horizon) break;
    ++steps[static_cast<std::size_t>(pos)];
  }
  return total;
}

// Monte Carlo estimate with its own RNG and its own Poisson sampler
// (inverse CDF on the raw distribution).
inline double monte_carlo_success(int path_len, int cut_index, double rate,
                                  int horizon, std::size_t episodes,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw_poisson = [&]() {
    double u = unif(rng);
    double p = std::exp(-rate);
    double acc = p;
    int n = 0;
    while (u >= acc && n < 4096) {
      ++n;
      p *= rate / n;
      acc += p;
    }
    return n;
  };

  std::size_t wins = 0;
  std::vector<int> steps(static_cast<std::size_t>(horizon));
  for (std::size_t e = 0; e < episodes; ++e) {
    for (int r = 0; r < horizon; ++r) steps[static_cast<std::size_t>(r)] = draw_poisson();
    if (play_episode_rules(path_len, cut_index, horizon, steps)) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(episodes);
}

// P(Poisson(lambda) >= k), summed directly.
inline double poisson_upper_tail(double lambda, int k) {
  if (k <= 0) return 1.0;
  double p = std::exp(-lambda);
  double below = 0.0;
  for (int n = 0; n < k; ++n) {
    if (n > 0) p *= lambda / n;
    below += p;
  }
  return 1.0 - below;
}

// ---- graph oracles --------------------------------------------------------

inline std::uint64_t count_paths_rec(const cutrope::AttackGraph& g,
                                     const cutrope::NodeId& cur,
                                     std::set<cutrope::NodeId>& visited) {
  if (cur == g.target()) return 1;
  std::uint64_t total = 0;
  for (const cutrope::NodeId& next : g.successors(cur)) {
    if (visited.contains(next)) continue;
    visited.insert(next);
    total += count_paths_rec(g, next, visited);
    visited.erase(next);
  }
  return total;
}

// Number of simple entry-to-target paths, by plain recursion.
inline std::uint64_t count_simple_paths(const cutrope::AttackGraph& g) {
  std::set<cutrope::NodeId> visited{g.entry()};
  return count_paths_rec(g, g.entry(), visited);
}

// ---- game oracles ---------------------------------------------------------

struct Solved2x2 {
  double row0 = 0.0;  // defender weight on row 0
  double col0 = 0.0;  // attacker weight on column 0
  double value = 0.0;
};

// Support enumeration for a 2x2 zero-sum game (row player minimizes): scan
// for a pure saddle, otherwise solve the indifference equations.
inline Solved2x2 solve_2x2(double a, double b, double c, double d) {
  // Matrix [[a, b], [c, d]].
  auto is_saddle = [&](int r, int col, double v) {
    double row_other = (col == 0) ? (r == 0 ? b : d) : (r == 0 ? a : c);
    double col_other = (r == 0) ? (col == 0 ? c : d) : (col == 0 ? a : b);
    return v >= row_other && v <= col_other;  // max in row, min in column
  };
  double entries[2][2] = {{a, b}, {c, d}};
  for (int r = 0; r < 2; ++r) {
    for (int col = 0; col < 2; ++col) {
      if (is_saddle(r, col, entries[r][col])) {
        return {r == 0 ? 1.0 : 0.0, col == 0 ? 1.0 : 0.0, entries[r][col]};
      }
    }
  }
  double x = (d - c) / (a - b - c + d);  // attacker indifferent between columns
  double y = (d - b) / (a - b - c + d);  // defender indifferent between rows
  return {x, y, a * x * y + b * x * (1 - y) + c * (1 - x) * y + d * (1 - x) * (1 - y)};
}

// Chi-square critical values at p = 0.001 for df = 1..8.
inline double chi_square_crit_p001(int df) {
  constexpr double table[] = {10.828, 13.816, 16.266, 18.467,
                              20.515, 22.458, 24.322, 26.124};
  return table[df - 1];
}

}  // namespace oracles
