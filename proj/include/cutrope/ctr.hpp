#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cutrope/graph.hpp"
#include "cutrope/rng.hpp"

namespace cutrope {

// Cut-the-Rope kernel parameters. move_rate is the Poisson intensity of
// attacker steps per round; horizon the number of rounds; tail_cutoff the
// truncation point of the per-round step distribution (the truncated tail is
// renormalized away; its mass is < 1e-12 under the defaults).
struct CtrParams {
  double move_rate = 2.0;
  int horizon = 10;
  int tail_cutoff = 64;

  void check() const;  // throws Errc::config on out-of-range values

  bool operator==(const CtrParams&) const = default;
};

// JSON {"move_rate": number, "horizon": int, "tail_cutoff": int}; defaults
// applied for absent fields, unknown fields rejected.
CtrParams parse_ctr_params(const std::string& text);
std::string serialize_ctr_params(const CtrParams& p);

// Per-round attacker step count: Poisson(move_rate) truncated to
// [0, tail_cutoff] and renormalized. The exact kernel and the simulator both
// draw from this table, so their stochastic semantics are identical.
class StepDistribution {
public:
  StepDistribution(double move_rate, int tail_cutoff);

  int cutoff() const { return static_cast<int>(pmf_.size()) - 1; }
  double pmf(int n) const { return (n < 0 || n > cutoff()) ? 0.0 : pmf_[static_cast<std::size_t>(n)]; }
  // P(N >= n); 1 for n <= 0, 0 beyond the cutoff.
  double upper_tail(int n) const;
  // Inverse-CDF sampling; deterministic given the rng state.
  int sample(SplitMix64& rng) const;

private:
  std::vector<double> pmf_;
  std::vector<double> upper_;  // upper_[n] = sum_{k >= n} pmf_[k]
};

// Probability that the attacker occupies the last node of `path` after
// params.horizon rounds, when the defender inspects `inspected` every round.
//
// Round semantics: the attacker advances N steps along the path (N from the
// step distribution, clamped at the final node). Reaching the final node is
// absorbing and is checked before inspection. Otherwise, if the inspected
// node lies on the traversed prefix excluding the first node, the attacker
// is reset to the first node.
//
// `path` must list at least two distinct nodes. Inspecting a node off the
// path, the first node, or the last node is valid and has no effect.
double success_probability(const AttackPath& path, const NodeId& inspected,
                           const CtrParams& params);
double success_probability(const AttackPath& path, const NodeId& inspected,
                           const CtrParams& params, const StepDistribution& steps);

// Defender-node x attacker-path matrix of attacker success probabilities.
struct PayoffMatrix {
  std::vector<NodeId> rows;      // defender actions
  std::vector<AttackPath> cols;  // attacker actions
  std::vector<double> entries;   // row-major

  double at(std::size_t r, std::size_t c) const { return entries[r * cols.size() + c]; }
  std::string row_label(std::size_t r) const { return rows[r].str(); }
  // "<1-based column index>:<node sequence>", e.g. "2:1->2->4->7->9".
  std::string col_label(std::size_t c) const;
};

// entries[i][j] = success_probability(paths[j], defender_actions[i], params).
// Paths must start at g's entry, be simple, and walk existing edges; they
// need not end at the target, so externally supplied strategy lists (for
// instance partial advances) can be priced too. The entry itself is not an
// inspectable defender action. Cells are independent; with threads > 1 they
// are computed in parallel with bit-identical results.
PayoffMatrix build_payoff_matrix(const AttackGraph& g,
                                 const std::vector<AttackPath>& paths,
                                 const std::vector<NodeId>& defender_actions,
                                 const CtrParams& params, unsigned threads = 1);

// JSON with rows, cols (paths as arrays of node ids), entries row-major.
std::string serialize_payoff_matrix(const PayoffMatrix& m);

}  // namespace cutrope
