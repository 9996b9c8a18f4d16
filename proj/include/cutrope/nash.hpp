#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cutrope/ctr.hpp"

namespace cutrope {

// Probability distribution over one side's pure actions, kept in that side's
// matrix order. Solver output has nonnegative weights summing to 1 within
// 1e-9 and a non-empty support.
struct MixedStrategy {
  std::vector<std::pair<std::string, double>> weights;

  double prob(std::string_view label) const;  // 0 when absent

  bool operator==(const MixedStrategy&) const = default;
};

struct EquilibriumGaps {
  double defender = 0.0;  // exploitability of the defender mix
  double attacker = 0.0;  // shortfall of the attacker mix
};

struct Equilibrium {
  MixedStrategy defender;  // over node ids
  MixedStrategy attacker;  // over column labels "<index>:<node sequence>"
  double value = 0.0;      // attacker success at equilibrium
  EquilibriumGaps gaps;
};

// Minimax solution of the zero-sum game: the defender (rows) minimizes and
// the attacker (columns) maximizes the attacker-success entries.
//
// Solved as a primal LP over the shifted matrix with a dense simplex using
// Bland's rule; the attacker strategy comes from the duals. Pivoting order
// is fixed, so equal matrix bytes produce equal equilibrium bytes.
// Probabilities below 1e-9 are snapped to 0 and the strategy renormalized.
Equilibrium solve_zero_sum(const PayoffMatrix& m);

enum class Side { defender, attacker };

struct BestResponse {
  std::string label;
  double value;
};

// Pure action optimizing the responder's objective against the opponent mix
// (defender responds to an attacker mix and vice versa). Ties break toward
// the lexicographically smallest label.
BestResponse best_response(const PayoffMatrix& m, const MixedStrategy& opponent_mix,
                           Side responder);

struct VerifyReport {
  double defender_gap = 0.0;
  double attacker_gap = 0.0;
  bool pass = false;
};

// Both deviation gaps; passes iff neither side can improve by more than tol.
VerifyReport verify_equilibrium(const PayoffMatrix& m, const Equilibrium& eq,
                                double tol = 1e-7);

// JSON {"defender": {...}, "attacker": {...}, "value": v, "gaps": {...}};
// probabilities printed with 6 decimals, gaps in shortest round-trip form.
std::string serialize_equilibrium(const Equilibrium& eq);

// Accepts the serialize_equilibrium shape; "gaps" optional; strategies may
// list support entries only. Weights are renormalized (6-decimal exports sum
// to 1 only approximately).
Equilibrium parse_equilibrium(const std::string& text);

}  // namespace cutrope
