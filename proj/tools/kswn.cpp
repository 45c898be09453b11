// kswn: generate small-world rings, trace routes, run experiment sweeps and
// Monte Carlo checks. Every run is fully determined by its flags.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kswn/experiments.hpp"
#include "kswn/netgen.hpp"
#include "kswn/routing.hpp"
#include "kswn/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

struct GlobalFlags {
  std::uint32_t n = 1024;
  std::uint32_t q = 1;
  std::uint64_t seed = 1;
  std::string scheme = "oblivious";
  std::optional<int> depth;
  double c = 1.0;
  double sigma = 4.0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint32_t> n_grid;
  std::string out;
  std::uint64_t trials = 0;
  unsigned jobs = 1;

  kswn::RoutingParams params() const {
    kswn::RoutingParams p;
    p.awareness_depth = depth;
    p.c = c;
    p.sigma = sigma;
    p.validate();
    return p;
  }
};

kswn::Scheme require_scheme(const std::string& name) {
  const auto s = kswn::parse_scheme(name);
  if (!s) throw std::invalid_argument("unknown scheme '" + name + "'");
  return *s;
}

// Writes to --out when given, stdout otherwise.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  write(file);
}

int run_gen(const GlobalFlags& g, bool augmented, std::optional<std::uint32_t> al_span) {
  kswn::NetworkConfig cfg{g.n, g.q, augmented, al_span, g.seed};
  const auto net = kswn::build_network(cfg);
  emit(g.out, [&](std::ostream& os) { kswn::write_network(os, net); });
  return kExitOk;
}

int run_route(const GlobalFlags& g, bool q_given, std::uint32_t source, std::uint32_t target,
              std::optional<std::uint64_t> hop_cap) {
  const auto scheme = require_scheme(g.scheme);
  auto cfg = kswn::network_variant(scheme, g.n, g.seed);
  if (q_given) cfg.q = g.q;
  const auto net = kswn::build_network(cfg);
  auto params = g.params();
  params.hop_cap = hop_cap;
  const auto r = kswn::route(scheme, net, source, target, params);
  emit(g.out, [&](std::ostream& os) {
    os << "#route scheme=" << kswn::scheme_name(scheme) << " n=" << g.n << " q=" << cfg.q << " seed=" << g.seed
       << " source=" << source << " target=" << target << '\n';
    os << 0 << '\t' << r.path[0] << '\t' << "start" << '\t' << net.distance(r.path[0], target) << '\n';
    for (std::size_t i = 1; i < r.path.size(); ++i)
      os << i << '\t' << r.path[i] << '\t' << kswn::link_kind_name(r.links[i - 1]) << '\t'
         << net.distance(r.path[i], target) << '\n';
    os << "#hops=" << r.hops() << " long_range_hops=" << r.long_range_hops << " final_hops=" << r.final_hops
       << " succeeded=" << (r.succeeded ? 1 : 0) << '\n';
  });
  return r.succeeded ? kExitOk : kExitCheckFailed;
}

kswn::ExperimentPlan make_plan(const GlobalFlags& g, const std::vector<std::string>& schemes,
                               std::uint32_t queries_per_node) {
  kswn::ExperimentPlan plan;
  if (!g.n_grid.empty()) plan.n_grid = g.n_grid;
  if (!g.seeds.empty()) plan.seeds = g.seeds;
  if (!schemes.empty()) {
    plan.schemes.clear();
    for (const auto& s : schemes) plan.schemes.push_back(require_scheme(s));
  }
  plan.queries_per_node = queries_per_node;
  plan.trials = g.trials;
  plan.params = g.params();
  plan.jobs = g.jobs;
  return plan;
}

int run_bench(const GlobalFlags& g, const std::vector<std::string>& schemes, std::uint32_t queries_per_node) {
  const auto rows = kswn::run_plan(make_plan(g, schemes, queries_per_node));
  emit(g.out, [&](std::ostream& os) { kswn::write_metrics_csv(os, rows); });
  return kExitOk;
}

struct VerifyFlags {
  std::string check = "all";
  std::uint64_t samples = 1'000'000;
  std::uint64_t origins = 2000;
  std::string rows;
  double max_deviation = 0.05;
  double min_fraction = 0.5;
  double min_probability = 0.05;
  double greedy_flatness = 1.6;
  double near_optimal_flatness = 1.7;
};

int run_verify(const GlobalFlags& g, const VerifyFlags& v) {
  const bool all = v.check == "all";
  std::vector<kswn::CheckReport> reports;
  if (all || v.check == "klink")
    reports.push_back(kswn::check_klink_law({g.n, v.samples, g.seed, v.max_deviation}));
  if (all || v.check == "awareness") {
    kswn::AwarenessSizeOptions o;
    o.n = g.n;
    o.depth = g.depth;
    o.sigma = g.sigma;
    o.origins = v.origins;
    o.seed = g.seed;
    o.min_fraction = v.min_fraction;
    o.jobs = g.jobs;
    reports.push_back(kswn::check_awareness_size(o).report);
  }
  if (all || v.check == "half") {
    kswn::HalfDistanceOptions o;
    o.n = g.n;
    o.depth = g.depth;
    o.origins = v.origins;
    o.seed = g.seed;
    o.min_probability = v.min_probability;
    o.jobs = g.jobs;
    reports.push_back(kswn::check_half_distance(o));
  }
  if (all || v.check == "scaling") {
    std::vector<kswn::MetricsRow> rows;
    if (!v.rows.empty()) {
      std::ifstream in(v.rows, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + v.rows);
      rows = kswn::read_metrics_csv(in);
    } else {
      GlobalFlags sweep = g;
      if (sweep.n_grid.empty()) sweep.n_grid = {1u << 12, 1u << 14, 1u << 16};
      if (sweep.seeds.empty()) sweep.seeds = {g.seed};
      if (sweep.trials == 0) sweep.trials = 2000;
      rows = kswn::run_plan(make_plan(sweep, {}, 1));
    }
    reports.push_back(kswn::fit_scaling(rows, {v.greedy_flatness, v.near_optimal_flatness}));
  }
  if (reports.empty()) throw std::invalid_argument("unknown check '" + v.check + "'");

  bool passed = true;
  for (const auto& r : reports) {
    kswn::write_check_text(std::cout, r);
    passed = passed && r.passed;
  }
  if (!g.out.empty()) emit(g.out, [&](std::ostream& os) { kswn::write_check_csv(os, reports); });
  else kswn::write_check_csv(std::cout, reports);
  return passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kleinberg small-world routing simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--n", g.n, "ring size")->check(CLI::Range(8u, 1u << 30));
  auto* q_opt = app.add_option("--q", g.q, "K-links per node")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "network seed");
  app.add_option("--scheme", g.scheme, "greedy_q1|greedy_q2|local_awareness|non_oblivious|oblivious");
  app.add_option("--depth", g.depth, "awareness depth (default max(1, floor(lg lg n)))");
  app.add_option("--c", g.c, "oblivious threshold constant");
  app.add_option("--sigma", g.sigma, "awareness constant");
  app.add_option("--seeds", g.seeds, "comma-separated seeds")->delimiter(',');
  app.add_option("--n-grid", g.n_grid, "comma-separated ring sizes")->delimiter(',');
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--trials", g.trials, "random (source, target) pairs per cell; 0 = one query per node");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "dump a network");
  bool augmented = true;
  std::optional<std::uint32_t> al_span;
  gen->add_option("--augmented", augmented, "add AL-links (1/0)");
  gen->add_option("--al-span", al_span, "AL sampling window (default floor(lg n)^2)");

  auto* route = app.add_subcommand("route", "trace one routing trial");
  std::uint32_t source = 0, target = 0;
  std::optional<std::uint64_t> hop_cap;
  route->add_option("--source", source)->required();
  route->add_option("--target", target)->required();
  route->add_option("--hop-cap", hop_cap);

  auto* bench = app.add_subcommand("bench", "run an experiment sweep, write metrics CSV");
  std::vector<std::string> schemes;
  std::uint32_t queries_per_node = 1;
  bench->add_option("--schemes", schemes, "comma-separated schemes (default all)")->delimiter(',');
  bench->add_option("--queries-per-node", queries_per_node)->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Monte Carlo checks");
  VerifyFlags v;
  verify->add_option("--check", v.check, "klink|awareness|half|scaling|all")
      ->check(CLI::IsMember({"klink", "awareness", "half", "scaling", "all"}));
  verify->add_option("--samples", v.samples, "K-link draws");
  verify->add_option("--origins", v.origins, "sampled origins");
  verify->add_option("--rows", v.rows, "metrics CSV for the scaling fit (default: run a sweep)");
  verify->add_option("--max-deviation", v.max_deviation);
  verify->add_option("--min-fraction", v.min_fraction);
  verify->add_option("--min-probability", v.min_probability);
  verify->add_option("--greedy-flatness", v.greedy_flatness);
  verify->add_option("--near-optimal-flatness", v.near_optimal_flatness);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen(g, augmented, al_span);
    if (route->parsed()) return run_route(g, q_opt->count() > 0, source, target, hop_cap);
    if (bench->parsed()) return run_bench(g, schemes, queries_per_node);
    if (verify->parsed()) return run_verify(g, v);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
