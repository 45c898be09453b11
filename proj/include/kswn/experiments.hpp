#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "kswn/awareness.hpp"
#include "kswn/netgen.hpp"
#include "kswn/rng.hpp"
#include "kswn/routing.hpp"

namespace kswn {

struct ExperimentPlan {
  std::vector<std::uint32_t> n_grid = {5000, 10000, 15000, 20000, 25000};
  std::vector<Scheme> schemes = {kAllSchemes.begin(), kAllSchemes.end()};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::uint32_t queries_per_node = 1;
  std::uint64_t trials = 0;  // 0: every node sends queries_per_node queries; else this many random pairs
  RoutingParams params;
  unsigned jobs = 1;

  void validate() const {
    if (n_grid.empty()) throw std::invalid_argument("experiment plan needs at least one n");
    if (schemes.empty()) throw std::invalid_argument("experiment plan needs at least one scheme");
    if (seeds.empty()) throw std::invalid_argument("experiment plan needs at least one seed");
    if (trials == 0 && queries_per_node == 0) throw std::invalid_argument("queries_per_node must be positive");
    for (const auto n : n_grid)
      if (n < 8) throw std::invalid_argument("every grid n must be at least 8");
    params.validate();
  }
};

struct MetricsRow {
  Scheme scheme = Scheme::greedy_q1;
  std::uint32_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  double mean_hops = 0.0;
  double hop_stddev = 0.0;
  std::uint64_t failures = 0;
  std::uint64_t storage_bits = 0;
};

/// Network variant a scheme runs on. Everything except greedy_q2 shares the
/// augmented single-K-link network, so paired comparisons see the same K-links.
inline NetworkConfig network_variant(Scheme scheme, std::uint32_t n, std::uint64_t seed) {
  NetworkConfig c;
  c.n = n;
  c.seed = seed;
  if (scheme == Scheme::greedy_q2) {
    c.q = 2;
    c.augmented = false;
  } else {
    c.q = 1;
    c.augmented = true;
  }
  return c;
}

/// Worst-case per-node storage in bits: stored node ids times ceil(lg n).
///   greedy:           own R and K links
///   local_awareness:  own links, ceil(lg n) successors and their K-links
///   near-optimal:     own R, K and AL links, A_x(depth) and one K-link per member
inline std::uint64_t storage_bits(Scheme scheme, const SmallWorldNet& net, const RoutingParams& params) {
  const std::uint64_t n = net.size();
  const std::uint64_t q = net.config().q;
  const std::uint64_t bits = id_bits(net.size());
  const std::uint64_t own = 1 + q;
  switch (scheme) {
    case Scheme::greedy_q1:
    case Scheme::greedy_q2: return own * bits;
    case Scheme::local_awareness: return (own + bits * (1 + q)) * bits;
    case Scheme::non_oblivious:
    case Scheme::oblivious: {
      if (!net.augmented()) throw std::invalid_argument("near-optimal storage needs an augmented network");
      const int depth = params.depth_for(net.size());
      std::uint64_t widest = 0;
      for (NodeId x = 0; x < n; ++x) widest = std::max<std::uint64_t>(widest, build_awareness(net, x, depth).size());
      return (own + SmallWorldNet::kAlPerNode + widest * (1 + q)) * bits;
    }
  }
  return 0;
}

/// (source, destination) pairs with destination uniform over nodes != source.
inline std::vector<std::pair<NodeId, NodeId>> draw_queries(std::uint32_t n, std::uint64_t seed,
                                                           std::uint32_t queries_per_node, std::uint64_t trials) {
  Engine rng(derive_seed(seed, n, 0x71756572ULL));
  const auto other = [&](NodeId src) {
    auto d = static_cast<NodeId>(uniform_below(rng, n - 1));
    return d >= src ? d + 1 : d;
  };
  std::vector<std::pair<NodeId, NodeId>> out;
  if (trials > 0) {
    out.reserve(trials);
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto src = static_cast<NodeId>(uniform_below(rng, n));
      out.emplace_back(src, other(src));
    }
  } else {
    out.reserve(std::size_t{n} * queries_per_node);
    for (NodeId src = 0; src < n; ++src)
      for (std::uint32_t j = 0; j < queries_per_node; ++j) out.emplace_back(src, other(src));
  }
  return out;
}

/// Runs body(i) for i in [0, count) on up to `jobs` threads in contiguous
/// chunks. Callers write results by index, so output never depends on jobs.
template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  const std::size_t chunk = (count + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(count, b + chunk);
    if (b >= e) break;
    workers.emplace_back([&body, b, e] {
      for (std::size_t i = b; i < e; ++i) body(i);
    });
  }
}

struct HopStats {
  std::uint64_t trials = 0;
  double mean_hops = 0.0;
  double hop_stddev = 0.0;
  std::uint64_t failures = 0;
};

/// Routes every query and summarises hop counts. Failed trials are excluded
/// from the mean and counted separately.
inline HopStats route_queries(Scheme scheme, const SmallWorldNet& net,
                              const std::vector<std::pair<NodeId, NodeId>>& queries, const RoutingParams& params,
                              unsigned jobs = 1) {
  std::vector<std::int64_t> hops(queries.size());
  parallel_for(queries.size(), jobs, [&](std::size_t i) {
    const auto r = route(scheme, net, queries[i].first, queries[i].second, params);
    hops[i] = r.succeeded ? static_cast<std::int64_t>(r.hops()) : -1;
  });
  HopStats st;
  st.trials = queries.size();
  double sum = 0.0;
  std::uint64_t ok = 0;
  for (const auto h : hops) {
    if (h < 0) {
      ++st.failures;
      continue;
    }
    sum += static_cast<double>(h);
    ++ok;
  }
  if (ok > 0) st.mean_hops = sum / static_cast<double>(ok);
  if (ok > 1) {
    double ss = 0.0;
    for (const auto h : hops)
      if (h >= 0) ss += (static_cast<double>(h) - st.mean_hops) * (static_cast<double>(h) - st.mean_hops);
    st.hop_stddev = std::sqrt(ss / static_cast<double>(ok - 1));
  }
  return st;
}

/// Sweeps n x seed x scheme. Rows come out in that nesting order. Destinations
/// depend only on (n, seed), so all schemes in a cell route the same queries.
inline std::vector<MetricsRow> run_plan(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<MetricsRow> rows;
  for (const auto n : plan.n_grid) {
    for (const auto seed : plan.seeds) {
      const auto queries = draw_queries(n, seed, plan.queries_per_node, plan.trials);
      std::map<std::pair<std::uint32_t, bool>, SmallWorldNet> networks;
      for (const auto scheme : plan.schemes) {
        const auto cfg = network_variant(scheme, n, seed);
        auto it = networks.find({cfg.q, cfg.augmented});
        if (it == networks.end()) it = networks.emplace(std::pair{cfg.q, cfg.augmented}, build_network(cfg)).first;
        const auto& net = it->second;
        const auto st = route_queries(scheme, net, queries, plan.params, plan.jobs);
        rows.push_back({scheme, n, seed, st.trials, st.mean_hops, st.hop_stddev, st.failures,
                        storage_bits(scheme, net, plan.params)});
      }
    }
  }
  return rows;
}

inline constexpr std::string_view kMetricsCsvHeader = "scheme,n,seed,trials,mean_hops,hop_stddev,failures,storage_bits";

inline std::string format_fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsCsvHeader << '\n';
  for (const auto& r : rows)
    out << scheme_name(r.scheme) << ',' << r.n << ',' << r.seed << ',' << r.trials << ',' << format_fixed4(r.mean_hops)
        << ',' << format_fixed4(r.hop_stddev) << ',' << r.failures << ',' << r.storage_bits << '\n';
}

inline std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader) throw std::runtime_error("missing metrics CSV header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f[8];
    for (auto& field : f)
      if (!std::getline(ss, field, ',')) throw std::runtime_error("short metrics CSV line: " + line);
    const auto scheme = parse_scheme(f[0]);
    if (!scheme) throw std::runtime_error("unknown scheme in CSV: " + f[0]);
    MetricsRow r;
    r.scheme = *scheme;
    r.n = static_cast<std::uint32_t>(std::stoul(f[1]));
    r.seed = std::stoull(f[2]);
    r.trials = std::stoull(f[3]);
    r.mean_hops = std::stod(f[4]);
    r.hop_stddev = std::stod(f[5]);
    r.failures = std::stoull(f[6]);
    r.storage_bits = std::stoull(f[7]);
    rows.push_back(r);
  }
  return rows;
}

/// Mean hops per n for one scheme, pooling seeds weighted by successful trials.
inline std::map<std::uint32_t, double> mean_hops_by_n(const std::vector<MetricsRow>& rows, Scheme scheme) {
  std::map<std::uint32_t, std::pair<double, double>> acc;
  for (const auto& r : rows) {
    if (r.scheme != scheme) continue;
    const auto ok = static_cast<double>(r.trials - r.failures);
    acc[r.n].first += r.mean_hops * ok;
    acc[r.n].second += ok;
  }
  std::map<std::uint32_t, double> out;
  for (const auto& [n, sw] : acc) out[n] = sw.second > 0 ? sw.first / sw.second : 0.0;
  return out;
}

}  // namespace kswn
