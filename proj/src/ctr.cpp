#include "cutrope/ctr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <json.hpp>

#include "cutrope/jsonio.hpp"

namespace cutrope {

void CtrParams::check() const {
  if (!(move_rate > 0.0) || !std::isfinite(move_rate)) {
    fail(Errc::config, "move_rate must be a positive finite number");
  }
  if (horizon < 1) fail(Errc::config, "horizon must be at least 1");
  if (tail_cutoff < 1) fail(Errc::config, "tail_cutoff must be at least 1");
}

CtrParams parse_ctr_params(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::syntax_error, std::string("params document is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(Errc::syntax_error, "params document must be a JSON object");
  CtrParams p;
  for (const auto& [key, value] : j.items()) {
    if (key == "move_rate") {
      if (!value.is_number()) fail(Errc::syntax_error, "move_rate must be a number");
      p.move_rate = value.get<double>();
    } else if (key == "horizon") {
      if (!value.is_number_integer()) fail(Errc::syntax_error, "horizon must be an integer");
      p.horizon = value.get<int>();
    } else if (key == "tail_cutoff") {
      if (!value.is_number_integer()) fail(Errc::syntax_error, "tail_cutoff must be an integer");
      p.tail_cutoff = value.get<int>();
    } else {
      fail(Errc::unknown_field, "unknown field \"" + key + "\" in params document");
    }
  }
  p.check();
  return p;
}

std::string serialize_ctr_params(const CtrParams& p) {
  std::string out = "{\n";
  out += "  \"move_rate\": " + fmt_shortest(p.move_rate) + ",\n";
  out += "  \"horizon\": " + std::to_string(p.horizon) + ",\n";
  out += "  \"tail_cutoff\": " + std::to_string(p.tail_cutoff) + "\n}";
  return out + "\n";
}

StepDistribution::StepDistribution(double move_rate, int tail_cutoff) {
  if (!(move_rate > 0.0) || tail_cutoff < 1) fail(Errc::config, "invalid step distribution parameters");
  pmf_.resize(static_cast<std::size_t>(tail_cutoff) + 1);
  // Poisson pmf by the stable ratio recurrence, then renormalize the
  // truncated mass away.
  double p = std::exp(-move_rate);
  double total = 0.0;
  for (int n = 0; n <= tail_cutoff; ++n) {
    if (n > 0) p *= move_rate / n;
    pmf_[static_cast<std::size_t>(n)] = p;
    total += p;
  }
  for (double& v : pmf_) v /= total;
  upper_.resize(pmf_.size());
  double acc = 0.0;
  for (int n = tail_cutoff; n >= 0; --n) {
    acc += pmf_[static_cast<std::size_t>(n)];
    upper_[static_cast<std::size_t>(n)] = acc;
  }
}

double StepDistribution::upper_tail(int n) const {
  if (n <= 0) return 1.0;
  if (n > cutoff()) return 0.0;
  return upper_[static_cast<std::size_t>(n)];
}

int StepDistribution::sample(SplitMix64& rng) const {
  double u = rng.next_double();
  double acc = 0.0;
  for (int n = 0; n < cutoff(); ++n) {
    acc += pmf_[static_cast<std::size_t>(n)];
    if (u < acc) return n;
  }
  return cutoff();
}

namespace {

// Position of `inspected` on the path when it can actually cut: strictly
// between the first and last node. -1 otherwise.
int cut_index(const AttackPath& path, const NodeId& inspected) {
  for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
    if (path.nodes[i] == inspected) return static_cast<int>(i);
  }
  return -1;
}

void check_path_shape(const AttackPath& path) {
  if (path.nodes.size() < 2) fail(Errc::invalid_path, "path needs at least two nodes");
  std::set<NodeId> seen(path.nodes.begin(), path.nodes.end());
  if (seen.size() != path.nodes.size()) fail(Errc::invalid_path, "path revisits a node: " + path.label());
}

}  // namespace

double success_probability(const AttackPath& path, const NodeId& inspected,
                           const CtrParams& params, const StepDistribution& steps) {
  params.check();
  check_path_shape(path);

  const int m = static_cast<int>(path.nodes.size());
  const int cut = cut_index(path, inspected);

  // Exact dynamic program over path positions 0..m-2, absorbing at m-1.
  // Per round, from position i:
  //   absorb with P(N >= m-1-i)  (clamping makes every large step a hit)
  //   land on j = i+n for n < m-1-i, then reset to 0 if cut <= j.
  std::vector<double> occ(static_cast<std::size_t>(m - 1), 0.0);
  std::vector<double> next(occ.size());
  occ[0] = 1.0;
  double absorbed = 0.0;
  for (int round = 0; round < params.horizon; ++round) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i <= m - 2; ++i) {
      double mass = occ[static_cast<std::size_t>(i)];
      if (mass == 0.0) continue;
      absorbed += mass * steps.upper_tail(m - 1 - i);
      int nmax = std::min(steps.cutoff(), m - 2 - i);
      for (int n = 0; n <= nmax; ++n) {
        int j = i + n;
        int dest = (cut >= 1 && j >= cut) ? 0 : j;
        next[static_cast<std::size_t>(dest)] += mass * steps.pmf(n);
      }
    }
    occ.swap(next);
  }
  return absorbed;
}

double success_probability(const AttackPath& path, const NodeId& inspected,
                           const CtrParams& params) {
  params.check();
  StepDistribution steps(params.move_rate, params.tail_cutoff);
  return success_probability(path, inspected, params, steps);
}

std::string PayoffMatrix::col_label(std::size_t c) const {
  return std::to_string(c + 1) + ":" + cols[c].label();
}

PayoffMatrix build_payoff_matrix(const AttackGraph& g,
                                 const std::vector<AttackPath>& paths,
                                 const std::vector<NodeId>& defender_actions,
                                 const CtrParams& params, unsigned threads) {
  params.check();
  if (paths.empty()) fail(Errc::empty_strategy_set, "no attacker paths");
  if (defender_actions.empty()) fail(Errc::empty_strategy_set, "no defender actions");

  std::set<NodeId> seen_actions;
  for (const NodeId& d : defender_actions) {
    if (!g.has_node(d)) fail(Errc::unknown_node, "defender action \"" + d.str() + "\" is not in the graph");
    if (d == g.entry()) fail(Errc::entry_not_inspectable, "the entry node cannot be inspected");
    if (!seen_actions.insert(d).second) fail(Errc::duplicate_action, "duplicate defender action \"" + d.str() + "\"");
  }
  for (const AttackPath& p : paths) {
    check_path_shape(p);
    if (p.nodes.front() != g.entry()) {
      fail(Errc::invalid_path, "path " + p.label() + " does not start at the entry");
    }
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
      const auto& succ = g.successors(p.nodes[i]);  // throws on unknown node
      if (!std::binary_search(succ.begin(), succ.end(), p.nodes[i + 1])) {
        fail(Errc::invalid_path, "path " + p.label() + " uses missing edge " +
                                     p.nodes[i].str() + "->" + p.nodes[i + 1].str());
      }
    }
  }

  PayoffMatrix m;
  m.rows = defender_actions;
  m.cols = paths;
  m.entries.assign(m.rows.size() * m.cols.size(), 0.0);

  StepDistribution steps(params.move_rate, params.tail_cutoff);
  auto compute_cell = [&](std::size_t idx) {
    std::size_t r = idx / m.cols.size();
    std::size_t c = idx % m.cols.size();
    m.entries[idx] = success_probability(m.cols[c], m.rows[r], params, steps);
  };

  std::size_t total = m.entries.size();
  if (threads <= 1 || total < 2) {
    for (std::size_t idx = 0; idx < total; ++idx) compute_cell(idx);
  } else {
    // Cells are independent and each is computed whole by one worker, so the
    // result is bit-identical to the sequential evaluation.
    unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(total));
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t idx = w; idx < total; idx += n_workers) compute_cell(idx);
      });
    }
    for (auto& t : workers) t.join();
  }
  return m;
}

std::string serialize_payoff_matrix(const PayoffMatrix& m) {
  nlohmann::ordered_json j;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const NodeId& r : m.rows) rows.push_back(r.str());
  auto& cols = j["cols"] = nlohmann::ordered_json::array();
  for (const AttackPath& p : m.cols) {
    nlohmann::ordered_json jp = nlohmann::ordered_json::array();
    for (const NodeId& n : p.nodes) jp.push_back(n.str());
    cols.push_back(std::move(jp));
  }
  j["entries"] = m.entries;
  return j.dump(2) + "\n";
}

}  // namespace cutrope
