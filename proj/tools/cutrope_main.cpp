// cutrope: game-theoretic attack-graph analysis.
//
// Subcommands: parse, paths, solve, digest, verify, extract, simulate.
// stdout carries machine-readable output only; diagnostics go to stderr.
// Exit codes: 0 success, 2 input/validation, 3 computation, 4 configuration.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cutrope/arena.hpp"
#include "cutrope/ctr.hpp"
#include "cutrope/digest.hpp"
#include "cutrope/error.hpp"
#include "cutrope/extraction.hpp"
#include "cutrope/graph.hpp"
#include "cutrope/jsonio.hpp"
#include "cutrope/nash.hpp"
#include "cutrope/sha256.hpp"
#include "cutrope/version.hpp"

namespace {

using namespace cutrope;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::config:
      return 4;
    case Errc::empty_matrix:
    case Errc::nonfinite_entry:
    case Errc::provider_failure:
    case Errc::unparseable_output:
      return 3;
    default:
      return 2;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write \"" + path + "\"");
  out << content;
  if (!out) fail(Errc::io, "failed writing \"" + path + "\"");
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
  for (const Diagnostic& d : diags) {
    std::cerr << "warning: " << d.code << (d.subject.empty() ? "" : " (" + d.subject + ")")
              << ": " << d.message << "\n";
  }
}

// Collects the data every run records in its manifest. A run that writes an
// output file writes <out>.manifest.json next to it.
struct RunRecorder {
  std::string subcommand;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();

  std::string read_input(const std::string& path) {
    std::string content = read_file(path);
    inputs[path] = sha256_hex(content);
    return content;
  }

  void emit(const std::string& data, const std::string& out_path) {
    if (out_path.empty()) {
      std::cout << data;
      return;
    }
    write_file(out_path, data);
    nlohmann::ordered_json manifest;
    manifest["subcommand"] = subcommand;
    manifest["version"] = kVersion;
    manifest["inputs"] = inputs;
    manifest["parameters"] = parameters;
    manifest["outputs"] = {{out_path, sha256_hex(data)}};
    write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
  }
};

AttackGraph load_graph(RunRecorder& rec, const std::string& path) {
  return parse_graph(rec.read_input(path));
}

CtrParams load_params(RunRecorder& rec, const std::string& path) {
  CtrParams params;
  if (!path.empty()) params = parse_ctr_params(rec.read_input(path));
  rec.parameters["params"] = nlohmann::ordered_json::parse(serialize_ctr_params(params));
  return params;
}

// Fails on an unreachable target, prints everything else as warnings.
void gate_on_validation(const AttackGraph& g) {
  std::vector<Diagnostic> diags = validate(g);
  for (const Diagnostic& d : diags) {
    if (d.code == kDiagTargetUnreachable) {
      print_diagnostics(diags);
      fail(Errc::target_unreachable, d.message);
    }
  }
  print_diagnostics(diags);
}

std::vector<NodeId> default_defender_actions(const AttackGraph& g) {
  std::vector<NodeId> actions;
  for (const Node& n : g.nodes()) {
    if (n.id != g.entry()) actions.push_back(n.id);
  }
  return actions;
}

std::string paths_to_json(const PathEnumeration& enumeration) {
  nlohmann::ordered_json j;
  auto& paths = j["paths"] = nlohmann::ordered_json::array();
  for (const AttackPath& p : enumeration.paths) {
    nlohmann::ordered_json jp = nlohmann::ordered_json::array();
    for (const NodeId& n : p.nodes) jp.push_back(n.str());
    paths.push_back(std::move(jp));
  }
  j["truncated"] = enumeration.truncated;
  return j.dump(2) + "\n";
}

struct SolveArtifacts {
  PayoffMatrix matrix;
  Equilibrium equilibrium;
  VerifyReport report;
};

SolveArtifacts solve_game(const AttackGraph& g, const CtrParams& params,
                          std::size_t max_paths, unsigned threads) {
  gate_on_validation(g);
  PathEnumeration enumeration = enumerate_paths(g, max_paths);
  if (enumeration.truncated) {
    std::cerr << "warning: PATH_LIMIT_EXCEEDED: only the first " << enumeration.paths.size()
              << " paths are considered\n";
  }
  SolveArtifacts art{
      build_payoff_matrix(g, enumeration.paths, default_defender_actions(g), params, threads),
      {},
      {}};
  art.equilibrium = solve_zero_sum(art.matrix);
  art.report = verify_equilibrium(art.matrix, art.equilibrium);
  return art;
}

Policy parse_policy(const nlohmann::json& j, Side side, const SolveArtifacts* solved) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    fail(Errc::syntax_error, "policy descriptor needs a \"kind\" string");
  }
  std::string kind = j["kind"].get<std::string>();
  if (kind == "uniform") return Policy::uniform();
  if (kind == "pure") {
    if (!j.contains("action") || !j["action"].is_string()) {
      fail(Errc::syntax_error, "pure policy needs an \"action\" string");
    }
    return Policy::pure(j["action"].get<std::string>());
  }
  if (kind == "equilibrium") {
    if (solved == nullptr) fail(Errc::config, "equilibrium policy requires a solvable game");
    return Policy::equilibrium(side == Side::attacker ? solved->equilibrium.attacker
                                                      : solved->equilibrium.defender);
  }
  fail(Errc::syntax_error, "unknown policy kind \"" + kind + "\"");
}

std::string metrics_to_json(const std::vector<Matchup>& matchups,
                            const std::vector<TournamentMetrics>& results,
                            const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config_hash"] = config_hash;
  auto& arr = j["results"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const TournamentMetrics& m = results[i];
    nlohmann::ordered_json r;
    r["matchup"] = i;
    r["red"] = matchups[i].red.describe();
    r["blue"] = matchups[i].blue.describe();
    r["episodes"] = m.episodes;
    r["wins"] = m.wins;
    r["success_rate"] = m.success_rate;
    r["success_variance"] = m.success_variance;
    r["rounds_variance"] = m.rounds_variance;
    r["ci95"] = {m.ci95.first, m.ci95.second};
    arr.push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

// ---- subcommand implementations ----

struct CommonFlags {
  std::string graph_file;
  std::string params_file;
  std::string out_path;
  std::size_t max_paths = kDefaultMaxPaths;
  unsigned threads = 1;
};

int cmd_parse(const CommonFlags& flags) {
  RunRecorder rec{"parse"};
  AttackGraph g = load_graph(rec, flags.graph_file);
  print_diagnostics(validate(g));
  rec.emit(serialize_graph(g), flags.out_path);
  return 0;
}

int cmd_paths(const CommonFlags& flags) {
  RunRecorder rec{"paths"};
  rec.parameters["max_paths"] = flags.max_paths;
  AttackGraph g = load_graph(rec, flags.graph_file);
  gate_on_validation(g);
  rec.emit(paths_to_json(enumerate_paths(g, flags.max_paths)), flags.out_path);
  return 0;
}

int cmd_solve(const CommonFlags& flags, const std::string& digest_format) {
  RunRecorder rec{"solve"};
  rec.parameters["max_paths"] = flags.max_paths;
  AttackGraph g = load_graph(rec, flags.graph_file);
  CtrParams params = load_params(rec, flags.params_file);

  SolveArtifacts art = solve_game(g, params, flags.max_paths, flags.threads);
  if (!art.report.pass) {
    std::cerr << "error: solver verification failed (defender gap "
              << fmt_shortest(art.report.defender_gap) << ", attacker gap "
              << fmt_shortest(art.report.attacker_gap) << ")\n";
    return 3;
  }

  std::string output = serialize_equilibrium(art.equilibrium);
  if (!digest_format.empty()) {
    rec.parameters["digest"] = digest_format;
    StrategicDigest d = render_digest(art.equilibrium, g, parse_digest_format(digest_format),
                                      serialize_ctr_params(params));
    output += "---\n" + d.text;
  }
  rec.emit(output, flags.out_path);
  return 0;
}

int cmd_digest(const CommonFlags& flags, const std::string& eq_file,
               const std::string& format_name, const std::string& inject_file) {
  RunRecorder rec{"digest"};
  rec.parameters["format"] = format_name;
  AttackGraph g = load_graph(rec, flags.graph_file);
  Equilibrium eq = parse_equilibrium(rec.read_input(eq_file));
  std::string fingerprint;
  if (!flags.params_file.empty()) fingerprint = serialize_ctr_params(load_params(rec, flags.params_file));
  StrategicDigest d = render_digest(eq, g, parse_digest_format(format_name), fingerprint);
  std::cerr << "digest source hash: " << d.source_hash << "\n";

  if (inject_file.empty()) {
    rec.emit(d.text, flags.out_path);
  } else {
    rec.emit(inject_digest(rec.read_input(inject_file), d), flags.out_path);
  }
  return 0;
}

int cmd_verify(const CommonFlags& flags, const std::string& eq_file, double tol) {
  RunRecorder rec{"verify"};
  rec.parameters["tol"] = tol;
  rec.parameters["max_paths"] = flags.max_paths;
  AttackGraph g = load_graph(rec, flags.graph_file);
  CtrParams params = load_params(rec, flags.params_file);
  Equilibrium eq = parse_equilibrium(rec.read_input(eq_file));

  gate_on_validation(g);
  PathEnumeration enumeration = enumerate_paths(g, flags.max_paths);
  PayoffMatrix matrix =
      build_payoff_matrix(g, enumeration.paths, default_defender_actions(g), params, flags.threads);
  VerifyReport report = verify_equilibrium(matrix, eq, tol);

  nlohmann::ordered_json j;
  j["defender_gap"] = report.defender_gap;
  j["attacker_gap"] = report.attacker_gap;
  j["tol"] = tol;
  j["pass"] = report.pass;
  rec.emit(j.dump(2) + "\n", flags.out_path);
  return report.pass ? 0 : 3;
}

int cmd_extract(const CommonFlags& flags, const std::string& logs_file,
                const std::string& provider_name, const std::string& replay_dir) {
  RunRecorder rec{"extract"};
  rec.parameters["provider"] = provider_name;
  std::string logs = rec.read_input(logs_file);

  if (provider_name == "fallback") {
    AttackGraph g = extract_graph_fallback(logs);
    print_diagnostics(validate(g));
    rec.emit(serialize_graph(g), flags.out_path);
    return 0;
  }

  std::unique_ptr<CompletionProvider> provider;
  if (provider_name == "replay") {
    if (replay_dir.empty()) fail(Errc::config, "--replay-dir is required with --provider replay");
    provider = std::make_unique<ReplayProvider>(replay_dir);
  } else if (provider_name == "remote") {
    provider = std::make_unique<RemoteProvider>(RemoteConfig::from_env());
  } else {
    fail(Errc::config, "unknown provider \"" + provider_name + "\" (want remote, replay, fallback)");
  }

  ExtractionResult result = extract_graph(logs, *provider);
  print_diagnostics(result.diagnostics);
  rec.emit(serialize_graph(result.graph), flags.out_path);
  return 0;
}

int cmd_simulate(const std::string& config_file, unsigned threads, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override) {
  RunRecorder rec{"simulate"};
  std::string config_text = rec.read_input(config_file);
  std::string config_hash = sha256_hex(config_text);

  nlohmann::json config;
  try {
    config = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::syntax_error, std::string("config is not valid JSON: ") + e.what());
  }
  if (!config.is_object()) fail(Errc::syntax_error, "config must be a JSON object");
  for (const char* field : {"graph", "episodes", "master_seed", "matchups"}) {
    if (!config.contains(field)) {
      fail(Errc::missing_field, std::string("config needs a \"") + field + "\" field");
    }
  }

  // Paths in the config resolve relative to the config file.
  std::filesystem::path base = std::filesystem::path(config_file).parent_path();
  std::string graph_path = (base / config["graph"].get<std::string>()).string();
  AttackGraph g = load_graph(rec, graph_path);

  CtrParams params;
  if (config.contains("params")) {
    if (config["params"].is_string()) {
      params = parse_ctr_params(rec.read_input((base / config["params"].get<std::string>()).string()));
    } else {
      params = parse_ctr_params(config["params"].dump());
    }
  }
  std::size_t episodes = config["episodes"].get<std::size_t>();
  std::uint64_t master_seed = config["master_seed"].get<std::uint64_t>();
  if (seed_override) master_seed = *seed_override;
  std::size_t max_paths = config.value("max_paths", kDefaultMaxPaths);

  rec.parameters["params"] = nlohmann::ordered_json::parse(serialize_ctr_params(params));
  rec.parameters["episodes"] = episodes;
  rec.parameters["master_seed"] = master_seed;
  rec.parameters["max_paths"] = max_paths;

  gate_on_validation(g);

  // Solve once if any matchup references the equilibrium strategies.
  bool needs_equilibrium = false;
  for (const auto& m : config["matchups"]) {
    for (const char* side : {"red", "blue"}) {
      if (m.contains(side) && m[side].is_object() && m[side].value("kind", "") == "equilibrium") {
        needs_equilibrium = true;
      }
    }
  }
  std::optional<SolveArtifacts> solved;
  if (needs_equilibrium) solved = solve_game(g, params, max_paths, threads);

  std::vector<Matchup> matchups;
  for (const auto& m : config["matchups"]) {
    if (!m.is_object() || !m.contains("red") || !m.contains("blue")) {
      fail(Errc::syntax_error, "each matchup needs \"red\" and \"blue\" policies");
    }
    matchups.push_back({parse_policy(m["red"], Side::attacker, solved ? &*solved : nullptr),
                        parse_policy(m["blue"], Side::defender, solved ? &*solved : nullptr)});
  }
  if (matchups.empty()) fail(Errc::syntax_error, "config lists no matchups");

  std::vector<TournamentMetrics> results =
      run_tournament(g, params, matchups, episodes, master_seed, threads, max_paths);
  rec.emit(metrics_to_json(matchups, results, config_hash), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"game-theoretic attack-graph analysis"};
  app.set_version_flag("--version", cutrope::kVersion);
  app.require_subcommand(1);

  CommonFlags flags;
  std::string digest_format, eq_file, inject_file, logs_file, provider_name, replay_dir;
  std::string config_file;
  double tol = 1e-7;
  std::optional<std::uint64_t> seed_override;

  auto add_common = [&](CLI::App* cmd, bool needs_graph) {
    if (needs_graph) cmd->add_option("--graph", flags.graph_file, "attack graph JSON file")->required();
    cmd->add_option("--out", flags.out_path, "write output (and a manifest) to this file");
  };

  CLI::App* parse_cmd = app.add_subcommand("parse", "parse and canonically reserialize a graph");
  add_common(parse_cmd, true);

  CLI::App* paths_cmd = app.add_subcommand("paths", "enumerate attacker paths");
  add_common(paths_cmd, true);
  paths_cmd->add_option("--max-paths", flags.max_paths, "path enumeration limit");

  CLI::App* solve_cmd = app.add_subcommand("solve", "compute the defender/attacker equilibrium");
  add_common(solve_cmd, true);
  solve_cmd->add_option("--params", flags.params_file, "kernel params JSON file");
  solve_cmd->add_option("--max-paths", flags.max_paths, "path enumeration limit");
  solve_cmd->add_option("--threads", flags.threads, "worker threads (output is thread-count independent)");
  solve_cmd->add_option("--digest", digest_format, "append a digest in this format (plain, markdown, json)");

  CLI::App* digest_cmd = app.add_subcommand("digest", "render a digest from a stored equilibrium");
  add_common(digest_cmd, true);
  digest_cmd->add_option("--eq", eq_file, "equilibrium JSON file")->required();
  digest_cmd->add_option("--format", digest_format, "plain, markdown, or json");
  digest_cmd->add_option("--params", flags.params_file, "kernel params JSON file (for the source hash)");
  digest_cmd->add_option("--inject", inject_file, "inject the digest into this prompt file");

  CLI::App* verify_cmd = app.add_subcommand("verify", "check a stored equilibrium against the game");
  add_common(verify_cmd, true);
  verify_cmd->add_option("--eq", eq_file, "equilibrium JSON file")->required();
  verify_cmd->add_option("--params", flags.params_file, "kernel params JSON file");
  verify_cmd->add_option("--max-paths", flags.max_paths, "path enumeration limit");
  verify_cmd->add_option("--threads", flags.threads, "worker threads");
  verify_cmd->add_option("--tol", tol, "verification tolerance");

  CLI::App* extract_cmd = app.add_subcommand("extract", "extract an attack graph from security logs");
  add_common(extract_cmd, false);
  extract_cmd->add_option("--logs", logs_file, "security log file")->required();
  extract_cmd->add_option("--provider", provider_name, "remote, replay, or fallback")->required();
  extract_cmd->add_option("--replay-dir", replay_dir, "fixture directory for the replay provider");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run an attack-and-defense tournament");
  add_common(simulate_cmd, false);
  simulate_cmd->add_option("--config", config_file, "tournament config JSON file")->required();
  simulate_cmd->add_option("--threads", flags.threads, "worker threads (report is thread-count independent)");
  simulate_cmd->add_option("--seed", seed_override, "override the config's master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(flags);
    if (paths_cmd->parsed()) return cmd_paths(flags);
    if (solve_cmd->parsed()) return cmd_solve(flags, digest_format);
    if (digest_cmd->parsed()) {
      return cmd_digest(flags, eq_file, digest_format.empty() ? "plain" : digest_format, inject_file);
    }
    if (verify_cmd->parsed()) return cmd_verify(flags, eq_file, tol);
    if (extract_cmd->parsed()) return cmd_extract(flags, logs_file, provider_name, replay_dir);
    if (simulate_cmd->parsed()) return cmd_simulate(config_file, flags.threads, flags.out_path, seed_override);
  } catch (const cutrope::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
