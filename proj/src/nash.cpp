#include "cutrope/nash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "cutrope/jsonio.hpp"

namespace cutrope {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kSnapEps = 1e-9;

// Dense simplex for  max sum(u)  s.t.  A u <= 1, u >= 0  with A > 0
// (A = transpose of the shifted payoff matrix). The all-slack basis is
// feasible, so no phase-1 is needed, and positivity of A bounds the feasible
// region, so the LP is never unbounded. Bland's rule (lowest variable index
// enters, lowest basic index breaks ratio ties) guarantees termination and
// fixes the pivot order.
struct SimplexResult {
  std::vector<double> primal;  // u, one per structural variable
  std::vector<double> dual;    // w, one per constraint
  double objective = 0.0;
};

SimplexResult solve_positive_lp(const std::vector<std::vector<double>>& a) {
  const std::size_t n_rows = a.size();        // constraints
  const std::size_t n_vars = a[0].size();     // structural variables
  const std::size_t width = n_vars + n_rows + 1;
  const std::size_t rhs = width - 1;

  std::vector<std::vector<double>> t(n_rows + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(n_rows);
  for (std::size_t j = 0; j < n_rows; ++j) {
    for (std::size_t i = 0; i < n_vars; ++i) t[j][i] = a[j][i];
    t[j][n_vars + j] = 1.0;
    t[j][rhs] = 1.0;
    basis[j] = n_vars + j;
  }
  for (std::size_t i = 0; i < n_vars; ++i) t[n_rows][i] = -1.0;

  // Bland's rule precludes cycling; the cap turns any numerical stall into a
  // hard failure instead of a hang.
  std::size_t max_pivots = 1000 + 100 * (n_vars + n_rows) * (n_vars + n_rows);
  for (std::size_t pivots = 0;; ++pivots) {
    if (pivots > max_pivots) fail(Errc::nonfinite_entry, "simplex did not converge");
    // Entering column: lowest-index variable with a negative reduced cost.
    std::size_t enter = width;
    for (std::size_t i = 0; i < n_vars + n_rows; ++i) {
      if (t[n_rows][i] < -kPivotEps) {
        enter = i;
        break;
      }
    }
    if (enter == width) break;  // optimal

    // Leaving row: minimum ratio, ties to the lowest basic variable index.
    std::size_t leave = n_rows;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_rows; ++j) {
      if (t[j][enter] <= kPivotEps) continue;
      double ratio = t[j][rhs] / t[j][enter];
      if (ratio < best_ratio - kPivotEps ||
          (ratio < best_ratio + kPivotEps && (leave == n_rows || basis[j] < basis[leave]))) {
        best_ratio = ratio;
        leave = j;
      }
    }
    if (leave == n_rows) fail(Errc::nonfinite_entry, "LP unbounded; matrix not positively shifted");

    double inv = 1.0 / t[leave][enter];
    for (std::size_t i = 0; i < width; ++i) t[leave][i] *= inv;
    t[leave][enter] = 1.0;
    for (std::size_t j = 0; j <= n_rows; ++j) {
      if (j == leave) continue;
      double factor = t[j][enter];
      if (factor == 0.0) continue;
      for (std::size_t i = 0; i < width; ++i) t[j][i] -= factor * t[leave][i];
      t[j][enter] = 0.0;
    }
    basis[leave] = enter;
  }

  SimplexResult res;
  res.primal.assign(n_vars, 0.0);
  for (std::size_t j = 0; j < n_rows; ++j) {
    if (basis[j] < n_vars) res.primal[basis[j]] = std::max(0.0, t[j][rhs]);
  }
  res.dual.assign(n_rows, 0.0);
  for (std::size_t j = 0; j < n_rows; ++j) {
    res.dual[j] = std::max(0.0, t[n_rows][n_vars + j]);
  }
  res.objective = t[n_rows][rhs];
  return res;
}

void snap_and_normalize(std::vector<double>& w) {
  double total = 0.0;
  for (double& v : w) {
    if (v < kSnapEps) v = 0.0;
    total += v;
  }
  if (total <= 0.0) fail(Errc::nonfinite_entry, "strategy support vanished");
  for (double& v : w) v /= total;
}

std::map<std::string, double> mix_as_map(const MixedStrategy& mix) {
  std::map<std::string, double> out;
  for (const auto& [label, weight] : mix.weights) out[label] += weight;
  return out;
}

// Mix weights aligned to the given labels; every mix label must resolve.
std::vector<double> align_mix(const MixedStrategy& mix,
                              const std::vector<std::string>& labels,
                              const char* side_name) {
  std::map<std::string, double> by_label = mix_as_map(mix);
  std::vector<double> out(labels.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = by_label.find(labels[i]);
    if (it != by_label.end()) {
      out[i] = it->second;
      by_label.erase(it);
    }
  }
  if (!by_label.empty()) {
    fail(Errc::label_mismatch, std::string("mix label \"") + by_label.begin()->first +
                                   "\" is not a " + side_name + " action of the matrix");
  }
  return out;
}

std::vector<std::string> row_labels(const PayoffMatrix& m) {
  std::vector<std::string> out;
  out.reserve(m.rows.size());
  for (std::size_t r = 0; r < m.rows.size(); ++r) out.push_back(m.row_label(r));
  return out;
}

std::vector<std::string> col_labels(const PayoffMatrix& m) {
  std::vector<std::string> out;
  out.reserve(m.cols.size());
  for (std::size_t c = 0; c < m.cols.size(); ++c) out.push_back(m.col_label(c));
  return out;
}

void check_matrix(const PayoffMatrix& m) {
  if (m.rows.empty() || m.cols.empty() || m.entries.empty()) {
    fail(Errc::empty_matrix, "payoff matrix has no entries");
  }
  if (m.entries.size() != m.rows.size() * m.cols.size()) {
    fail(Errc::empty_matrix, "payoff matrix entries do not match its labels");
  }
  for (double v : m.entries) {
    if (!std::isfinite(v)) fail(Errc::nonfinite_entry, "payoff matrix contains a non-finite entry");
  }
}

}  // namespace

double MixedStrategy::prob(std::string_view label) const {
  for (const auto& [l, w] : weights) {
    if (l == label) return w;
  }
  return 0.0;
}

Equilibrium solve_zero_sum(const PayoffMatrix& m) {
  check_matrix(m);
  const std::size_t n_rows = m.rows.size();
  const std::size_t n_cols = m.cols.size();

  double min_entry = *std::min_element(m.entries.begin(), m.entries.end());
  double shift = 1.0 - min_entry;  // shifted entries >= 1 > 0

  // Defender LP over the shifted matrix S = M + shift:
  //   max sum(u)  s.t.  S^T u <= 1, u >= 0
  // with x = u / sum(u), shifted value V = 1 / sum(u); the attacker strategy
  // is the scaled dual vector.
  std::vector<std::vector<double>> a(n_cols, std::vector<double>(n_rows));
  for (std::size_t c = 0; c < n_cols; ++c) {
    for (std::size_t r = 0; r < n_rows; ++r) a[c][r] = m.at(r, c) + shift;
  }
  SimplexResult lp = solve_positive_lp(a);
  if (!(lp.objective > 0.0)) fail(Errc::nonfinite_entry, "degenerate LP objective");

  std::vector<double> x = lp.primal;
  std::vector<double> y = lp.dual;
  snap_and_normalize(x);
  snap_and_normalize(y);

  Equilibrium eq;
  eq.value = 1.0 / lp.objective - shift;
  eq.defender.weights.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) eq.defender.weights.emplace_back(m.row_label(r), x[r]);
  eq.attacker.weights.reserve(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) eq.attacker.weights.emplace_back(m.col_label(c), y[c]);

  // Deviation gaps of the shipped (snapped) strategies.
  double ceiling = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_cols; ++c) {
    double v = 0.0;
    for (std::size_t r = 0; r < n_rows; ++r) v += x[r] * m.at(r, c);
    ceiling = std::max(ceiling, v);
  }
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n_rows; ++r) {
    double v = 0.0;
    for (std::size_t c = 0; c < n_cols; ++c) v += y[c] * m.at(r, c);
    floor = std::min(floor, v);
  }
  eq.gaps.defender = ceiling - eq.value;
  eq.gaps.attacker = eq.value - floor;
  return eq;
}

BestResponse best_response(const PayoffMatrix& m, const MixedStrategy& opponent_mix,
                           Side responder) {
  check_matrix(m);
  BestResponse best;
  if (responder == Side::defender) {
    std::vector<double> y = align_mix(opponent_mix, col_labels(m), "attacker");
    best.value = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      double v = 0.0;
      for (std::size_t c = 0; c < m.cols.size(); ++c) v += y[c] * m.at(r, c);
      std::string label = m.row_label(r);
      if (v < best.value || (v == best.value && label < best.label)) {
        best.value = v;
        best.label = std::move(label);
      }
    }
  } else {
    std::vector<double> x = align_mix(opponent_mix, row_labels(m), "defender");
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      double v = 0.0;
      for (std::size_t r = 0; r < m.rows.size(); ++r) v += x[r] * m.at(r, c);
      std::string label = m.col_label(c);
      if (v > best.value || (v == best.value && label < best.label)) {
        best.value = v;
        best.label = std::move(label);
      }
    }
  }
  return best;
}

VerifyReport verify_equilibrium(const PayoffMatrix& m, const Equilibrium& eq, double tol) {
  VerifyReport report;
  BestResponse attacker_br = best_response(m, eq.defender, Side::attacker);
  BestResponse defender_br = best_response(m, eq.attacker, Side::defender);
  report.defender_gap = attacker_br.value - eq.value;
  report.attacker_gap = eq.value - defender_br.value;
  report.pass = report.defender_gap <= tol && report.attacker_gap <= tol;
  return report;
}

std::string serialize_equilibrium(const Equilibrium& eq) {
  std::string out = "{\n  \"defender\": {";
  for (std::size_t i = 0; i < eq.defender.weights.size(); ++i) {
    const auto& [label, w] = eq.defender.weights[i];
    out += (i == 0 ? "\n" : ",\n");
    out += "    \"" + json_escape(label) + "\": " + fmt_fixed(w, 6);
  }
  out += "\n  },\n  \"attacker\": {";
  for (std::size_t i = 0; i < eq.attacker.weights.size(); ++i) {
    const auto& [label, w] = eq.attacker.weights[i];
    out += (i == 0 ? "\n" : ",\n");
    out += "    \"" + json_escape(label) + "\": " + fmt_fixed(w, 6);
  }
  out += "\n  },\n  \"value\": " + fmt_fixed(eq.value, 6) + ",\n";
  out += "  \"gaps\": {\n";
  out += "    \"defender\": " + fmt_shortest(eq.gaps.defender) + ",\n";
  out += "    \"attacker\": " + fmt_shortest(eq.gaps.attacker) + "\n  }\n}\n";
  return out;
}

namespace {

MixedStrategy parse_mix(const nlohmann::ordered_json& obj, const char* side_name) {
  if (!obj.is_object()) fail(Errc::syntax_error, std::string(side_name) + " strategy must be an object");
  MixedStrategy mix;
  double total = 0.0;
  for (const auto& [label, value] : obj.items()) {
    if (!value.is_number()) fail(Errc::syntax_error, "strategy weights must be numbers");
    double w = value.get<double>();
    if (w < 0.0 || !std::isfinite(w)) fail(Errc::syntax_error, "strategy weights must be nonnegative");
    mix.weights.emplace_back(label, w);
    total += w;
  }
  if (mix.weights.empty() || std::abs(total - 1.0) > 1e-5) {
    fail(Errc::syntax_error, std::string(side_name) + " strategy weights must sum to 1");
  }
  for (auto& [label, w] : mix.weights) w /= total;
  return mix;
}

}  // namespace

Equilibrium parse_equilibrium(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::syntax_error, std::string("equilibrium document is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(Errc::syntax_error, "equilibrium document must be a JSON object");

  Equilibrium eq;
  bool have_defender = false, have_attacker = false, have_value = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "defender") {
      eq.defender = parse_mix(value, "defender");
      have_defender = true;
    } else if (key == "attacker") {
      eq.attacker = parse_mix(value, "attacker");
      have_attacker = true;
    } else if (key == "value") {
      if (!value.is_number()) fail(Errc::syntax_error, "value must be a number");
      eq.value = value.get<double>();
      have_value = true;
    } else if (key == "gaps") {
      if (!value.is_object()) fail(Errc::syntax_error, "gaps must be an object");
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "defender") eq.gaps.defender = gv.get<double>();
        else if (gk == "attacker") eq.gaps.attacker = gv.get<double>();
        else fail(Errc::unknown_field, "unknown field \"" + gk + "\" in gaps");
      }
    } else {
      fail(Errc::unknown_field, "unknown field \"" + key + "\" in equilibrium document");
    }
  }
  if (!have_defender || !have_attacker || !have_value) {
    fail(Errc::missing_field, "equilibrium document needs defender, attacker, and value");
  }
  return eq;
}

}  // namespace cutrope
