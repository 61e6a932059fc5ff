// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: acceptance [trust_config.json] [--only N[,N...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "trustfuse/config.hpp"
#include "trustfuse/harness.hpp"
#include "trustfuse/records.hpp"

using namespace trustfuse;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string f3(double v) { return fmt(v, 3); }

std::string sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

TrustConfig g_trust;

struct PairedExcess
{
  double no_security = 0.0;
  double security_aware = 0.0;
  double ospa_ns = 0.0;
  double ospa_sa = 0.0;
  RunRecord sa_record;
};

PairedExcess paired_excess(const ScenarioConfig& scen, const std::vector<ThreatConfig>& threats, std::uint64_t seed)
{
  const auto attacked = simulate(scen, threats, seed);
  const auto benign = simulate(scen, {}, seed);
  const double w = default_window_start(threats);
  PairedExcess p;
  const auto ns = evaluate(attacked, g_trust, Mode::NoSecurity, {}, w);
  p.sa_record = evaluate(attacked, g_trust, Mode::SecurityAware, {}, w);
  const auto ns_b = evaluate(benign, g_trust, Mode::NoSecurity, {}, w);
  const auto sa_b = evaluate(benign, g_trust, Mode::SecurityAware, {}, w);
  p.ospa_ns = ns.summary.ospa;
  p.ospa_sa = p.sa_record.summary.ospa;
  p.no_security = ns.summary.ospa - ns_b.summary.ospa;
  p.security_aware = p.sa_record.summary.ospa - sa_b.summary.ospa;
  return p;
}

ThreatConfig fp_threat(int agent, Temporal temporal, int n_fp, std::uint64_t seed)
{
  ThreatConfig t;
  t.target_agent_id = agent;
  t.manifest = Manifest::FalsePositive;
  t.temporal = temporal;
  t.n_fp = n_fp;
  t.start_time = 2.0;
  t.rng_seed = seed;
  return t;
}

// 1. Single static false-positive attacker in case0: secure excess <= 30% of unsecured.
Outcome criterion_ospa_recovery()
{
  const auto t0 = Clock::now();
  const auto scen = scenarios::case0();
  int ok = 0;
  double ns_sum = 0.0, sa_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = paired_excess(scen, {fp_threat(0, Temporal::Static, 3, 1000 + seed)}, seed);
    ns_sum += p.no_security;
    sa_sum += p.security_aware;
    if (p.no_security > 0.0 && p.security_aware <= 0.3 * p.no_security) ++ok;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << ok << "/20 seeds with >=70% excess reduction (need 16); mean excess NoSecurity " << f3(ns_sum / 20)
    << ", SecurityAware " << f3(sa_sum / 20) << "; " << fmt(secs, 1) << " s (limit 60)";
  return {ok >= 16 && secs <= 60.0, d.str()};
}

// 2. Two Markovian false-positive attackers in case1: >= 50% excess reduction.
Outcome criterion_two_attackers()
{
  const auto scen = scenarios::case1();
  int ok = 0;
  double ns_sum = 0.0, sa_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = paired_excess(
        scen, {fp_threat(0, Temporal::Markovian, 3, 2000 + seed), fp_threat(1, Temporal::Markovian, 3, 3000 + seed)}, seed);
    ns_sum += p.no_security;
    sa_sum += p.security_aware;
    if (p.no_security > 0.0 && p.security_aware <= 0.5 * p.no_security) ++ok;
  }
  std::ostringstream d;
  d << ok << "/20 seeds with >=50% excess reduction (need 14); mean excess NoSecurity " << f3(ns_sum / 20)
    << ", SecurityAware " << f3(sa_sum / 20);
  return {ok >= 14, d.str()};
}

// 3. False-negative attacker in case2: fused OSPA unchanged between modes, attacked
// agent distrusted within 5 s.
Outcome criterion_false_negative()
{
  const auto scen = scenarios::case2();
  int detected = 0;
  double ns_sum = 0.0, sa_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ThreatConfig t;
    t.target_agent_id = 0;
    t.manifest = Manifest::FalseNegative;
    t.n_fn = 2;
    t.start_time = 2.0;
    t.rng_seed = 4000 + seed;
    const auto ds = simulate(scen, {t}, seed);
    const double w = default_window_start({t});
    const auto ns = evaluate(ds, g_trust, Mode::NoSecurity, {}, w);
    const auto sa = evaluate(ds, g_trust, Mode::SecurityAware, {}, w);
    ns_sum += ns.summary.ospa;
    sa_sum += sa.summary.ospa;
    for (const auto& f : sa.frames) {
      if (f.timestamp < t.start_time || f.timestamp > t.start_time + 5.0 + 1e-9) continue;
      const auto it = f.agent_trust_mean.find(t.target_agent_id);
      if (it != f.agent_trust_mean.end() && it->second < 0.5) {
        ++detected;
        break;
      }
    }
  }
  const double change = (sa_sum - ns_sum) / ns_sum;
  std::ostringstream d;
  d << "OSPA change SecurityAware vs NoSecurity " << fmt(100 * change, 1) << "% (limit +-10%; mean " << f3(ns_sum / 20)
    << " -> " << f3(sa_sum / 20) << "); attacked agent below 0.5 within 5 s in " << detected << "/20 seeds (need 16)";
  return {std::abs(change) <= 0.10 && detected >= 16, d.str()};
}

// 4. Trust-metric levels over a 100-run Monte Carlo corpus.
Outcome criterion_trust_levels()
{
  const auto lib = builtin_library();
  const auto cases = sample_corpus(McAttackSampler{}, 100, 7);
  double agent = 0.0, track = 0.0;
  for (const auto& c : cases) {
    const auto& scen = lib.at(c.scenario);
    const auto ds = simulate(scen, {c.threat}, c.seed);
    const auto rec = evaluate(ds, g_trust, Mode::SecurityAware, {}, default_window_start({c.threat}));
    agent += rec.summary.agent_trust_score.value_or(0.0);
    track += rec.summary.track_trust_score.value_or(0.0);
  }
  agent /= 100.0;
  track /= 100.0;
  std::ostringstream d;
  d << "agent trust score " << f3(agent) << " (need >= 0.75), track trust score " << f3(track) << " (need >= 0.80)";
  return {agent >= 0.75 && track >= 0.80, d.str()};
}

// 5. Benign runs: secure F1 within 0.05 of unsecured on every scenario and seed.
Outcome criterion_benign()
{
  int ok = 0;
  double worst = 0.0;
  for (const auto& name : scenarios::builtin_names()) {
    const auto scen = scenarios::builtin(name);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto ds = simulate(scen, {}, seed);
      const double ns = evaluate(ds, g_trust, Mode::NoSecurity).summary.f1;
      const double sa = evaluate(ds, g_trust, Mode::SecurityAware).summary.f1;
      worst = std::max(worst, std::abs(sa - ns));
      if (std::abs(sa - ns) <= 0.05) ++ok;
    }
  }
  std::ostringstream d;
  d << ok << "/30 runs within 0.05 F1; worst gap " << f3(worst);
  return {ok == 30, d.str()};
}

// 6. Closed-form conjugate update against a numerically normalized posterior.
Outcome criterion_conjugacy()
{
  const auto t0 = Clock::now();
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> log_prior(std::log(0.2), std::log(50.0));
  std::uniform_int_distribution<int> len(0, 25);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a0 = std::exp(log_prior(rng)), b0 = std::exp(log_prior(rng));
    std::vector<Psm> psms;
    std::vector<std::pair<double, double>> vc;
    for (int i = len(rng); i > 0; --i) {
      psms.push_back({0, u01(rng), u01(rng), 0});
      vc.emplace_back(psms.back().value, psms.back().confidence);
    }
    const auto post = update_trust(TrustDistribution::make(a0, b0), psms);
    const auto ref = oracle::grid_posterior(a0, b0, vc);
    worst = std::max({worst, std::abs(post.mean() - ref.mean), std::abs(post.variance() - ref.variance)});
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "1000 cases, worst |mean or variance error| " << sci(worst) << " (tol 1e-6); " << fmt(secs, 2)
    << " s (limit 5)";
  return {worst <= 1e-6 && secs <= 5.0, d.str()};
}

// 7. Negative weighting that exactly balances a mostly positive PSM.
Outcome criterion_weighted_identity()
{
  const std::vector<Psm> psm{{0, 0.9, 1.0, 0}};
  const auto inc = weighted_increment(psm, 9.0, 1.0);
  // 0.9 has no exact binary form, so the two sides can only agree to rounding. A dyadic
  // instance of the same identity (v = 3/4, bias 3) must match bit for bit.
  const double ulp = std::nextafter(inc.d_alpha, 2.0) - inc.d_alpha;
  const double gap_ulps = std::abs(inc.d_alpha - inc.d_beta) / ulp;
  const std::vector<Psm> dyadic{{0, 0.75, 1.0, 0}};
  const auto exact = weighted_increment(dyadic, 3.0, 1.0);
  std::ostringstream d;
  d.precision(17);
  d << "v=0.9 bias=9: d_alpha " << inc.d_alpha << ", d_beta " << inc.d_beta << " (" << gap_ulps
    << " ulp apart); v=0.75 bias=3: " << exact.d_alpha << " vs " << exact.d_beta;
  return {gap_ulps <= 2.0 && exact.d_alpha == exact.d_beta, d.str()};
}

// 8. Closed-form trust distance against trapezoid integration of |F_t - F_r|.
Outcome criterion_trust_distance()
{
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> lu(0.0, std::log(100.0));
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = TrustDistribution::make(std::exp(lu(rng)), std::exp(lu(rng)));
    const auto [trusted, distrusted] = oracle::trapezoid_trust_distances(t.alpha, t.beta);
    worst = std::max({worst, std::abs(trust_distance(t, TrustTarget::Trusted) - trusted),
                      std::abs(trust_distance(t, TrustTarget::Distrusted) - distrusted)});
  }
  std::ostringstream d;
  d << "1000 Betas x 2 targets, worst error " << sci(worst) << " (tol 1e-6)";
  return {worst <= 1e-6, d.str()};
}

std::vector<Point2> random_set(std::mt19937_64& rng)
{
  std::uniform_int_distribution<int> n(0, 7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::vector<Point2> out(static_cast<std::size_t>(n(rng)));
  for (auto& p : out) p = {u(rng), u(rng)};
  return out;
}

// 9. OSPA is a metric.
Outcome criterion_ospa_axioms()
{
  std::mt19937_64 rng(909);
  int identity = 0, symmetry = 0, triangle = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_set(rng), y = random_set(rng), z = random_set(rng);
    for (double p : {1.0, 2.0}) {
      identity += ospa(x, x, 10.0, p) != 0.0;
      symmetry += ospa(x, y, 10.0, p) != ospa(y, x, 10.0, p);
      triangle += ospa(x, z, 10.0, p) > ospa(x, y, 10.0, p) + ospa(y, z, 10.0, p) + 1e-12;
    }
  }
  std::ostringstream d;
  d << "1000 triples x p in {1,2}: identity violations " << identity << ", symmetry " << symmetry << ", triangle "
    << triangle;
  return {identity + symmetry + triangle == 0, d.str()};
}

// 10. Quantized FOV against brute-force line of sight.
Outcome criterion_fov_fidelity()
{
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> pos(-28.0, 28.0);
  std::uniform_real_distribution<double> len(2.0, 12.0);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  std::uniform_real_distribution<double> rad(0.5, 2.0);
  std::uniform_int_distribution<int> n_walls(1, 5), n_objects(3, 10);
  double sum = 0.0, worst = 1.0, sum_fine = 0.0;
  for (int layout = 0; layout < 50; ++layout) {
    World world;
    for (int i = n_walls(rng); i > 0;) {
      const Point2 a{pos(rng), pos(rng)};
      const double th = ang(rng), l = len(rng);
      const Segment w{a, a + Point2{std::cos(th), std::sin(th)} * l};
      if (point_segment_distance({0, 0}, w.a, w.b) < 1.5) continue;
      world.walls.push_back(w);
      --i;
    }
    for (int i = n_objects(rng); i > 0;) {
      WorldObject o;
      o.state.id = static_cast<int>(world.objects.size());
      o.state.position = {pos(rng), pos(rng)};
      o.state.radius = rad(rng);
      bool ok = o.state.position.norm() > o.state.radius + 1.5;
      for (const auto& q : world.objects)
        ok = ok && distance(q.state.position, o.state.position) > q.state.radius + o.state.radius + 0.5;
      for (const auto& w : world.walls) ok = ok && point_segment_distance(o.state.position, w.a, w.b) > o.state.radius;
      if (!ok) continue;
      world.objects.push_back(o);
      --i;
    }
    WorldAgent agent;
    agent.spec.sensor.max_range = 30.0;
    agent.pose = Pose2(0.0, 0.0, ang(rng));
    const double a = oracle::fov_grid_agreement(world, agent, 72);
    sum_fine += oracle::fov_grid_agreement(world, agent, 144);
    sum += a;
    worst = std::min(worst, a);
  }
  std::ostringstream d;
  d << "50 layouts, mean agreement " << fmt(100 * sum / 50, 2) << "% (need 97%), worst layout " << fmt(100 * worst, 2)
    << "%; at 144 bins " << fmt(100 * sum_fine / 50, 2) << "%";
  return {sum / 50 >= 0.97, d.str()};
}

// 11. Propagator fixed points and convergence.
Outcome criterion_propagators()
{
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> lp(std::log(0.1), std::log(200.0));
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::uniform_real_distribution<double> omega_d(0.05, 0.5);
  std::uniform_real_distribution<double> delta_d(1.2, 8.0);
  double worst_rate = 0.0, worst_final = 0.0;
  int non_monotone = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto start = TrustDistribution::make(std::exp(lp(rng)), std::exp(lp(rng)));
    const auto prior = TrustDistribution::make(std::exp(lp(rng)), std::exp(lp(rng)));

    const double omega = omega_d(rng);
    auto t = start;
    for (int k = 1; k <= 1000; ++k) {
      t = propagate_prior(t, prior, omega);
      const double r = std::pow(1.0 - omega, k);
      const double ea = prior.alpha + r * (start.alpha - prior.alpha);
      const double eb = prior.beta + r * (start.beta - prior.beta);
      worst_rate = std::max({worst_rate, std::abs(t.alpha - ea) / std::max(1.0, ea),
                             std::abs(t.beta - eb) / std::max(1.0, eb)});
    }
    worst_final = std::max({worst_final, std::abs(t.alpha - prior.alpha), std::abs(t.beta - prior.beta)});

    const double target_mu = u(rng), dmu = delta_d(rng);
    t = start;
    double gap = std::abs(t.mean() - target_mu);
    for (int k = 0; k < 600; ++k) {
      t = propagate_expectation(t, dmu, target_mu);
      const double g = std::abs(t.mean() - target_mu);
      non_monotone += g > gap + 1e-15;
      gap = g;
    }
    worst_final = std::max(worst_final, gap);

    const double target_nu = std::exp(lp(rng)) + 1.0, dnu = delta_d(rng);
    t = start;
    gap = std::abs(t.precision() - target_nu);
    const double mu0 = t.mean();
    for (int k = 0; k < 600; ++k) {
      t = propagate_variance(t, dnu, target_nu);
      const double g = std::abs(t.precision() - target_nu);
      non_monotone += g > gap + 1e-12;
      gap = g;
    }
    worst_final = std::max({worst_final, gap / target_nu, std::abs(t.mean() - mu0)});
  }
  std::ostringstream d;
  d << "500 random starts: prior-mixing rate error " << sci(worst_rate) << ", worst distance to fixed point "
    << sci(worst_final) << " (tol 1e-9), non-monotone steps " << non_monotone;
  return {worst_rate <= 1e-9 && worst_final <= 1e-9 && non_monotone == 0, d.str()};
}

// 12. Identical inputs give byte-identical records.
Outcome criterion_determinism()
{
  EvalSettings settings;
  settings.keep_snapshots = true;
  auto once = [&](Mode mode) {
    std::ostringstream os;
    const std::vector<ThreatConfig> threats{fp_threat(1, Temporal::Markovian, 2, 77)};
    write_run(os, run_scenario(scenarios::case1(), threats, g_trust, mode, 12, settings));
    auto lib = builtin_library();
    for (auto& [name, scen] : lib) scen.duration = 8.0;
    for (const auto& run : mc_attacks(lib, McAttackSampler{}, 3, 12, g_trust)) os << mc_run_record(run).dump() << '\n';
    return os.str();
  };
  int identical = 0;
  std::size_t bytes = 0;
  for (Mode mode : {Mode::NoSecurity, Mode::SecurityAware}) {
    const auto a = once(mode), b = once(mode);
    identical += a == b;
    bytes += a.size();
  }
  std::ostringstream d;
  d << identical << "/2 modes byte-identical across repeats (" << bytes << " bytes compared per repeat)";
  return {identical == 2, d.str()};
}

}  // namespace

int main(int argc, char** argv)
{
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    } else {
      g_trust = load_trust(a);
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"ospa recovery, one static FP attacker", criterion_ospa_recovery},
      {"two Markovian FP attackers", criterion_two_attackers},
      {"false-negative attacker detected", criterion_false_negative},
      {"trust-metric levels over MC corpus", criterion_trust_levels},
      {"benign non-degradation", criterion_benign},
      {"conjugate update vs numerical posterior", criterion_conjugacy},
      {"weighted-update balance identity", criterion_weighted_identity},
      {"trust distance vs trapezoid integral", criterion_trust_distance},
      {"OSPA metric axioms", criterion_ospa_axioms},
      {"FOV vs line of sight", criterion_fov_fidelity},
      {"propagator fixed points", criterion_propagators},
      {"determinism of records", criterion_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.contains(n)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
