// Command-line front end: single runs, Monte Carlo attack corpora, trust tuning and
// reports over the resulting JSONL records.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trustfuse/config.hpp"
#include "trustfuse/harness.hpp"
#include "trustfuse/records.hpp"

namespace fs = std::filesystem;
using namespace trustfuse;

namespace {

struct RunArgs
{
  std::string scenario;
  std::string threat;
  std::string trust_config;
  std::string mode = "SecurityAware";
  std::uint64_t seed = 0;
  std::string out = "-";
};

struct McAttackArgs
{
  int n = 100;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string config;
  std::string trust_config;
};

struct McTuneArgs
{
  int n_configs = 50;
  std::string corpus;
  std::string out = "-";
  std::uint64_t seed = 0;
  std::string config;
  std::string trust_config;
  bool include_base = true;
};

struct ReportArgs
{
  std::vector<std::string> inputs;
};

class Output
{
public:
  explicit Output(const std::string& path)
  {
    if (path != "-") {
      if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
      file_.open(path);
      if (!file_) throw ConfigError("--out", "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  bool is_stdout() const { return !file_.is_open(); }

private:
  std::ofstream file_;
};

TrustConfig trust_or_default(const std::string& file) { return file.empty() ? TrustConfig{} : load_trust(file); }

ScenarioLibrary library_for(const std::vector<std::string>& names)
{
  ScenarioLibrary lib;
  for (const auto& n : names) lib[n] = load_scenario(n);
  return lib;
}

int cmd_run(const RunArgs& a)
{
  const auto scenario = load_scenario(a.scenario);
  const auto threats = a.threat.empty() ? std::vector<ThreatConfig>{} : load_threats(a.threat);
  const auto trust = trust_or_default(a.trust_config);
  const auto mode = parse_mode(a.mode, "--mode");
  for (const auto& t : threats) {
    const bool known = std::any_of(scenario.agents.begin(), scenario.agents.end(),
                                   [&](const AgentSpec& s) { return s.id == t.target_agent_id; });
    if (!known) throw ConfigError("--threat", "target_agent_id " + std::to_string(t.target_agent_id) + " is not in the scenario");
  }

  EvalSettings settings;
  settings.keep_snapshots = true;
  const auto rec = run_scenario(scenario, threats, trust, mode, a.seed, settings);
  Output out(a.out);
  write_run(out.stream(), rec);

  std::ostream& table_os = out.is_stdout() ? std::cerr : std::cout;
  TextTable table(summary_header());
  table.add(summary_row(rec.run_id, rec.summary));
  table.print(table_os);
  return 0;
}

int cmd_mc_attacks(const McAttackArgs& a)
{
  McAttackSampler sampler;
  TrustConfig trust = trust_or_default(a.trust_config);
  if (!a.config.empty()) {
    const auto j = load_json_file(a.config);
    try {
      cfg::Node n(j, "");
      if (n.has("mc_attack")) sampler = mc_attack_from_json(n.at("mc_attack"));
      if (n.has("mc_tune")) mc_tune_from_json(n.at("mc_tune"));  // shared file: validate only
      if (n.has("trust")) trust = trust_from_json(n.at("trust"), "trust");
      n.check_no_unknown();
    } catch (const ConfigError& e) {
      throw ConfigError(a.config + ":" + e.path(), e.message());
    }
  }
  if (a.n <= 0) throw ConfigError("--n", "must be > 0");
  const auto lib = library_for(sampler.scene_choices);
  const auto cases = sample_corpus(sampler, a.n, a.seed);

  fs::create_directories(a.out_dir);
  std::ofstream corpus(fs::path(a.out_dir) / "corpus.jsonl");
  std::ofstream runs(fs::path(a.out_dir) / "runs.jsonl");
  std::ofstream frames(fs::path(a.out_dir) / "frames.jsonl");
  if (!corpus || !runs || !frames) throw ConfigError("--out-dir", "cannot write into '" + a.out_dir + "'");

  struct Acc
  {
    int n = 0;
    double ns_excess = 0, sa_excess = 0, agent = 0, track = 0;
  };
  std::map<std::string, Acc> by_attack;
  for (const auto& c : cases) {
    corpus << case_record(c).dump() << '\n';
    const auto run = execute_case(c, lib, trust);
    runs << mc_run_record(run).dump() << '\n';
    write_run(frames, run.no_security);
    write_run(frames, run.security_aware);
    for (const auto& key : {to_string(c.threat.manifest) + "-" + to_string(c.threat.temporal), std::string("all")}) {
      auto& acc = by_attack[key];
      ++acc.n;
      acc.ns_excess += run.no_security.summary.ospa - run.benign_no_security.ospa;
      acc.sa_excess += run.security_aware.summary.ospa - run.benign_security_aware.ospa;
      acc.agent += run.security_aware.summary.agent_trust_score.value_or(0.0);
      acc.track += run.security_aware.summary.track_trust_score.value_or(0.0);
    }
  }

  TextTable table({"attack", "runs", "ospa_excess_nosec", "ospa_excess_secure", "agent_trust", "track_trust"});
  for (const auto& [key, acc] : by_attack) {
    const double n = acc.n;
    table.add({key, std::to_string(acc.n), fmt(acc.ns_excess / n), fmt(acc.sa_excess / n), fmt(acc.agent / n),
               fmt(acc.track / n)});
  }
  table.print(std::cout);
  std::ofstream summary(fs::path(a.out_dir) / "summary.txt");
  table.print(summary);
  return 0;
}

std::vector<McCase> load_corpus(const std::string& file)
{
  std::ifstream in(file);
  if (!in) throw ConfigError(file, "cannot open file");
  std::vector<McCase> cases;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    const std::string where = file + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(where, std::string("invalid JSON: ") + e.what());
    }
    if (j.value("type", "") != "mc_case") continue;
    try {
      cases.push_back(case_from_record(j, ""));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ":" + e.path(), e.message());
    }
  }
  if (cases.empty()) throw ConfigError(file, "no mc_case records found");
  return cases;
}

int cmd_mc_tune(const McTuneArgs& a)
{
  McTuneSampler sampler;
  TrustConfig base = trust_or_default(a.trust_config);
  if (!a.config.empty()) {
    const auto j = load_json_file(a.config);
    try {
      cfg::Node n(j, "");
      if (n.has("mc_tune")) sampler = mc_tune_from_json(n.at("mc_tune"));
      if (n.has("mc_attack")) mc_attack_from_json(n.at("mc_attack"));
      if (n.has("trust")) base = trust_from_json(n.at("trust"), "trust");
      n.check_no_unknown();
    } catch (const ConfigError& e) {
      throw ConfigError(a.config + ":" + e.path(), e.message());
    }
  }
  if (a.n_configs <= 0) throw ConfigError("--n-configs", "must be > 0");
  const auto cases = load_corpus(a.corpus);
  std::vector<std::string> names;
  for (const auto& c : cases) names.push_back(c.scenario);
  const auto corpus = materialize(cases, library_for(names));
  const auto results = mc_tune(corpus, sampler, a.n_configs, a.seed, base, a.include_base);

  Output out(a.out);
  for (std::size_t i = 0; i < results.size(); ++i) out.stream() << tune_record(static_cast<int>(i), results[i]).dump() << '\n';

  std::ostream& table_os = out.is_stdout() ? std::cerr : std::cout;
  TextTable table({"rank", "objective", "agent_trust", "track_trust", "ospa_term", "gamma", "t_ignore", "agent_bias",
                   "track_bias"});
  for (std::size_t i = 0; i < results.size() && i < 10; ++i) {
    const auto& r = results[i];
    table.add({std::to_string(i), fmt(r.objective), fmt(r.agent_trust_score), fmt(r.track_trust_score),
               fmt(r.ospa_term), fmt(r.config.gamma), fmt(r.config.t_ignore), fmt(r.config.agent_negativity_bias),
               fmt(r.config.track_negativity_bias)});
  }
  table.print(table_os);
  return 0;
}

int cmd_report(const ReportArgs& a)
{
  TextTable runs(summary_header());
  TextTable mc({"mc_run", "attack", "ospa_excess_nosec", "ospa_excess_secure", "agent_trust", "track_trust"});
  TextTable tune({"rank", "objective", "agent_trust", "track_trust", "ospa_term"});
  int n_runs = 0, n_mc = 0, n_tune = 0;
  for (const auto& file : a.inputs) {
    std::ifstream in(file);
    if (!in) throw ConfigError(file, "cannot open file");
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ConfigError(file + ":" + std::to_string(lineno), std::string("invalid JSON: ") + e.what());
      }
      const auto type = j.value("type", "");
      auto num = [](const json& v) { return v.is_number() ? fmt(v.get<double>()) : std::string("-"); };
      if (type == "summary") {
        ++n_runs;
        runs.add({j.value("run_id", ""), std::to_string(j.value("n_frames", 0)), num(j["precision"]), num(j["recall"]),
                  num(j["f1"]), num(j["ospa"]), num(j["track_trust_score"]), num(j["agent_trust_score"])});
      } else if (type == "mc_run") {
        ++n_mc;
        const auto& ns = j["NoSecurity"];
        const auto& sa = j["SecurityAware"];
        const double ns_ex = ns.value("ospa", 0.0) - j["benign_NoSecurity"].value("ospa", 0.0);
        const double sa_ex = sa.value("ospa", 0.0) - j["benign_SecurityAware"].value("ospa", 0.0);
        const auto& t = j["threat"];
        mc.add({j.value("run_id", ""), t.value("manifest", "") + "-" + t.value("temporal", ""), fmt(ns_ex), fmt(sa_ex),
                num(sa["agent_trust_score"]), num(sa["track_trust_score"])});
      } else if (type == "tune_result") {
        ++n_tune;
        tune.add({std::to_string(j.value("rank", 0)), num(j["objective"]), num(j["agent_trust_score"]),
                  num(j["track_trust_score"]), num(j["ospa_term"])});
      }
    }
  }
  if (n_runs + n_mc + n_tune == 0) throw ConfigError("report", "no summary, mc_run or tune_result records found");
  if (n_runs > 0) runs.print(std::cout);
  if (n_mc > 0) {
    if (n_runs > 0) std::cout << '\n';
    mc.print(std::cout);
  }
  if (n_tune > 0) {
    if (n_runs + n_mc > 0) std::cout << '\n';
    tune.print(std::cout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Trust-aware multi-agent sensor fusion simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Simulate one scenario and write per-frame records");
  run->add_option("--scenario", run_args.scenario, "Built-in scenario name (case0, case1, case2) or JSON file")->required();
  run->add_option("--threat", run_args.threat, "Threat JSON file (object or array); omit for a benign run");
  run->add_option("--trust-config", run_args.trust_config, "Trust configuration JSON file");
  run->add_option("--mode", run_args.mode, "NoSecurity or SecurityAware")->capture_default_str();
  run->add_option("--seed", run_args.seed, "Simulation seed")->capture_default_str();
  run->add_option("--out", run_args.out, "Output JSONL file, '-' for stdout")->capture_default_str();

  McAttackArgs mc_args;
  auto* mc = app.add_subcommand("mc-attacks", "Sample and run a Monte Carlo adversarial corpus");
  mc->add_option("--n", mc_args.n, "Number of sampled runs")->capture_default_str();
  mc->add_option("--seed", mc_args.seed, "Corpus seed")->capture_default_str();
  mc->add_option("--out-dir", mc_args.out_dir, "Directory for corpus.jsonl, runs.jsonl, frames.jsonl, summary.txt")->required();
  mc->add_option("--config", mc_args.config, "JSON with optional 'mc_attack', 'mc_tune' and 'trust' sections");
  mc->add_option("--trust-config", mc_args.trust_config, "Trust configuration JSON file");

  McTuneArgs tune_args;
  auto* tune = app.add_subcommand("mc-tune", "Score randomized trust configurations on a corpus");
  tune->add_option("--n-configs", tune_args.n_configs, "Number of sampled configurations")->capture_default_str();
  tune->add_option("--corpus", tune_args.corpus, "corpus.jsonl written by mc-attacks")->required();
  tune->add_option("--out", tune_args.out, "Output JSONL file, '-' for stdout")->capture_default_str();
  tune->add_option("--seed", tune_args.seed, "Sampler seed")->capture_default_str();
  tune->add_option("--config", tune_args.config, "JSON with optional 'mc_attack', 'mc_tune' and 'trust' sections");
  tune->add_option("--trust-config", tune_args.trust_config, "Base trust configuration JSON file");
  tune->add_flag("!--no-base", tune_args.include_base, "Do not score the base configuration as candidate 0");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Summarize JSONL records as plain-text tables");
  report->add_option("inputs", report_args.inputs, "JSONL files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (mc->parsed()) return cmd_mc_attacks(mc_args);
    if (tune->parsed()) return cmd_mc_tune(tune_args);
    if (report->parsed()) return cmd_report(report_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
