#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kswn/rng.hpp"

namespace kswn {

using NodeId = std::uint32_t;

/// floor(lg n)^2, the default width of the augmented-local sampling window.
inline std::uint32_t default_al_span(std::uint32_t n) {
  const auto lg = static_cast<std::uint32_t>(std::floor(std::log2(static_cast<double>(n))));
  return lg * lg;
}

/// max(1, floor(lg lg n)), the default awareness depth.
inline int default_awareness_depth(std::uint32_t n) {
  const double lglg = std::log2(std::log2(static_cast<double>(n)));
  return std::max(1, static_cast<int>(std::floor(lglg)));
}

/// ceil(lg n), the bit width of one node id.
inline std::uint32_t id_bits(std::uint32_t n) {
  std::uint32_t bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

struct NetworkConfig {
  std::uint32_t n = 1024;
  std::uint32_t q = 1;
  bool augmented = false;
  std::optional<std::uint32_t> al_span;  // unset: floor(lg n)^2
  std::uint64_t seed = 0;

  /// The explicit span, or floor(lg n)^2 capped at n-1.
  std::uint32_t effective_al_span() const { return al_span ? *al_span : std::min(default_al_span(n), n - 1); }

  void validate() const {
    if (n < 8) throw std::invalid_argument("n must be at least 8, got " + std::to_string(n));
    if (q < 1) throw std::invalid_argument("q must be at least 1");
    const auto span = effective_al_span();
    if (span < 1 || span > n - 1)
      throw std::invalid_argument("al_span must lie in [1, n-1], got " + std::to_string(span));
  }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Directed ring distance (v - u) mod n.
constexpr std::uint32_t ring_distance(NodeId u, NodeId v, std::uint32_t n) noexcept {
  return v >= u ? v - u : n - (u - v);
}

/// Cumulative breakpoints B_1..B_{n-1} of the 1-harmonic distance law,
/// B_k = H_k / H_{n-1}. Element k-1 holds B_k; the last element is exactly 1.
inline std::vector<double> harmonic_cdf_intervals(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("harmonic_cdf_intervals needs n >= 2");
  std::vector<double> breakpoints(n - 1);
  double partial = 0.0;
  for (std::uint32_t k = 1; k <= n - 1; ++k) {
    partial += 1.0 / static_cast<double>(k);
    breakpoints[k - 1] = partial;
  }
  const double total = partial;
  for (auto& b : breakpoints) b /= total;
  breakpoints.back() = 1.0;
  return breakpoints;
}

/// Distance k whose interval (B_{k-1}, B_k] contains x, for x in (0, 1].
inline std::uint32_t harmonic_offset(double x, std::span<const double> breakpoints) {
  const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
  if (it == breakpoints.end()) return static_cast<std::uint32_t>(breakpoints.size());
  return static_cast<std::uint32_t>(it - breakpoints.begin()) + 1;
}

/// (u + offset) mod n.
constexpr NodeId offset_node(NodeId u, std::uint64_t offset, std::uint32_t n) noexcept {
  return static_cast<NodeId>((std::uint64_t{u} + offset) % n);
}

/// Long-range target for a given uniform draw x.
inline NodeId k_link_target(NodeId u, double x, std::span<const double> breakpoints) {
  const auto n = static_cast<std::uint32_t>(breakpoints.size() + 1);
  return offset_node(u, harmonic_offset(x, breakpoints), n);
}

inline NodeId sample_k_link(NodeId u, std::span<const double> breakpoints, Engine& rng) {
  return k_link_target(u, uniform_open_closed(rng), breakpoints);
}

inline std::pair<NodeId, NodeId> sample_al_links(NodeId u, std::uint32_t al_span,
                                                  std::uint32_t n, Engine& rng) {
  const auto o1 = uniform_below(rng, al_span) + 1;
  const auto o2 = uniform_below(rng, al_span) + 1;
  return {offset_node(u, o1, n), offset_node(u, o2, n)};
}

/// Immutable small-world ring: implicit R-links, q K-links per node and,
/// when augmented, two AL-links per node.
class SmallWorldNet {
 public:
  static constexpr std::uint32_t kAlPerNode = 2;

  SmallWorldNet(NetworkConfig config, std::vector<NodeId> k_links, std::vector<NodeId> al_links)
      : config_(config), k_links_(std::move(k_links)), al_links_(std::move(al_links)) {
    config_.validate();
    if (k_links_.size() != std::size_t{config_.n} * config_.q)
      throw std::invalid_argument("k-link table has wrong size");
    const std::size_t al_expected = config_.augmented ? std::size_t{config_.n} * kAlPerNode : 0;
    if (al_links_.size() != al_expected) throw std::invalid_argument("al-link table has wrong size");
  }

  const NetworkConfig& config() const noexcept { return config_; }
  std::uint32_t size() const noexcept { return config_.n; }
  bool augmented() const noexcept { return config_.augmented; }
  std::uint32_t al_span() const { return config_.effective_al_span(); }

  NodeId r_neighbor(NodeId u) const noexcept { return u + 1 == config_.n ? 0 : u + 1; }

  std::span<const NodeId> k_neighbors(NodeId u) const noexcept {
    return {k_links_.data() + std::size_t{u} * config_.q, config_.q};
  }

  /// Empty for non-augmented networks.
  std::span<const NodeId> al_neighbors(NodeId u) const noexcept {
    if (!config_.augmented) return {};
    return {al_links_.data() + std::size_t{u} * kAlPerNode, kAlPerNode};
  }

  std::uint32_t distance(NodeId u, NodeId v) const noexcept { return ring_distance(u, v, config_.n); }

  friend bool operator==(const SmallWorldNet&, const SmallWorldNet&) = default;

 private:
  NetworkConfig config_;
  std::vector<NodeId> k_links_;
  std::vector<NodeId> al_links_;
};

/// Samples every node's links in node order 0..n-1 from a single stream
/// seeded by config.seed: q K-links, then (if augmented) two AL-links.
inline SmallWorldNet build_network(const NetworkConfig& config) {
  config.validate();
  const auto n = config.n;
  const auto breakpoints = harmonic_cdf_intervals(n);
  const auto span = config.effective_al_span();
  Engine rng(config.seed);

  std::vector<NodeId> k_links;
  k_links.reserve(std::size_t{n} * config.q);
  std::vector<NodeId> al_links;
  if (config.augmented) al_links.reserve(std::size_t{n} * SmallWorldNet::kAlPerNode);

  for (NodeId u = 0; u < n; ++u) {
    for (std::uint32_t j = 0; j < config.q; ++j) k_links.push_back(sample_k_link(u, breakpoints, rng));
    if (config.augmented) {
      const auto [a, b] = sample_al_links(u, span, n, rng);
      al_links.push_back(a);
      al_links.push_back(b);
    }
  }
  return SmallWorldNet(config, std::move(k_links), std::move(al_links));
}

/// Plain-text dump: a `#kswn` header, then `id<TAB>k1[,k2...]<TAB>al1,al2`
/// per node. Non-augmented networks omit the third field and report al_span=0.
inline void write_network(std::ostream& out, const SmallWorldNet& net) {
  const auto& c = net.config();
  out << "#kswn n=" << c.n << " q=" << c.q << " seed=" << c.seed
      << " al_span=" << (c.augmented ? c.effective_al_span() : 0) << '\n';
  for (NodeId u = 0; u < c.n; ++u) {
    out << u << '\t';
    const auto ks = net.k_neighbors(u);
    for (std::size_t i = 0; i < ks.size(); ++i) out << (i ? "," : "") << ks[i];
    if (c.augmented) {
      const auto als = net.al_neighbors(u);
      out << '\t' << als[0] << ',' << als[1];
    }
    out << '\n';
  }
}

}  // namespace kswn
