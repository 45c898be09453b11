#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kswn/awareness.hpp"
#include "kswn/netgen.hpp"

namespace kswn {

enum class Scheme { greedy_q1, greedy_q2, local_awareness, non_oblivious, oblivious };

inline constexpr std::array<Scheme, 5> kAllSchemes = {Scheme::greedy_q1, Scheme::greedy_q2,
                                                      Scheme::local_awareness, Scheme::non_oblivious,
                                                      Scheme::oblivious};

constexpr std::string_view scheme_name(Scheme s) noexcept {
  switch (s) {
    case Scheme::greedy_q1: return "greedy_q1";
    case Scheme::greedy_q2: return "greedy_q2";
    case Scheme::local_awareness: return "local_awareness";
    case Scheme::non_oblivious: return "non_oblivious";
    case Scheme::oblivious: return "oblivious";
  }
  return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (const auto s : kAllSchemes)
    if (scheme_name(s) == name) return s;
  return std::nullopt;
}

/// Schemes that run on the augmented single-K-link network variant.
constexpr bool needs_augmented(Scheme s) noexcept {
  return s == Scheme::non_oblivious || s == Scheme::oblivious;
}

constexpr bool is_greedy(Scheme s) noexcept { return s == Scheme::greedy_q1 || s == Scheme::greedy_q2; }

enum class LinkKind : std::uint8_t { ring, kleinberg, augmented };

constexpr std::string_view link_kind_name(LinkKind k) noexcept {
  switch (k) {
    case LinkKind::ring: return "R";
    case LinkKind::kleinberg: return "K";
    case LinkKind::augmented: return "AL";
  }
  return "?";
}

struct RoutingParams {
  std::optional<int> awareness_depth;       // unset: max(1, floor(lg lg n))
  double c = 1.0;                           // oblivious threshold constant
  std::optional<std::uint64_t> hop_cap;     // unset: 50 * ceil(lg n)^2
  double sigma = 4.0;

  int depth_for(std::uint32_t n) const { return awareness_depth ? *awareness_depth : default_awareness_depth(n); }

  std::uint64_t hop_cap_for(std::uint32_t n) const {
    if (hop_cap) return *hop_cap;
    const std::uint64_t b = id_bits(n);
    return 50 * b * b;
  }

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    if (awareness_depth && *awareness_depth < 0) throw std::invalid_argument("awareness depth must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  }
};

/// (lg n)^2 * lg lg n, the distance below which the near-optimal schemes
/// switch to plain greedy forwarding.
inline double long_range_threshold(std::uint32_t n) {
  const double lg = std::log2(static_cast<double>(n));
  return lg * lg * std::log2(lg);
}

struct Hop {
  NodeId node;
  LinkKind kind;
};

struct RouteResult {
  Scheme scheme = Scheme::greedy_q1;
  std::vector<NodeId> path;     // source first
  std::vector<LinkKind> links;  // links[i] carries path[i] -> path[i+1]
  std::uint64_t long_range_hops = 0;
  std::uint64_t final_hops = 0;
  bool succeeded = false;

  std::uint64_t hops() const noexcept { return path.empty() ? 0 : path.size() - 1; }
};

/// Whether `kind` names an actual link u -> v in the network.
inline bool has_link(const SmallWorldNet& net, NodeId u, NodeId v, LinkKind kind) {
  switch (kind) {
    case LinkKind::ring: return net.r_neighbor(u) == v;
    case LinkKind::kleinberg:
      for (const NodeId k : net.k_neighbors(u))
        if (k == v) return true;
      return false;
    case LinkKind::augmented:
      for (const NodeId a : net.al_neighbors(u))
        if (a == v) return true;
      return false;
  }
  return false;
}

/// Every hop of the trace is a real link and the bookkeeping is consistent.
inline bool trace_is_valid(const SmallWorldNet& net, const RouteResult& r) {
  if (r.path.empty() || r.links.size() + 1 != r.path.size()) return false;
  if (r.long_range_hops + r.final_hops != r.hops()) return false;
  for (std::size_t i = 0; i + 1 < r.path.size(); ++i)
    if (!has_link(net, r.path[i], r.path[i + 1], r.links[i])) return false;
  return true;
}

/// Immediate neighbour of x closest to t. Ties go to the R-link, then
/// K-links in stored order, then AL-links in stored order.
inline Hop greedy_choice(const SmallWorldNet& net, NodeId x, NodeId t, bool use_al) {
  Hop best{net.r_neighbor(x), LinkKind::ring};
  auto best_d = net.distance(best.node, t);
  for (const NodeId k : net.k_neighbors(x)) {
    const auto d = net.distance(k, t);
    if (d < best_d) best = {k, LinkKind::kleinberg}, best_d = d;
  }
  if (use_al) {
    for (const NodeId a : net.al_neighbors(x)) {
      const auto d = net.distance(a, t);
      if (d < best_d) best = {a, LinkKind::augmented}, best_d = d;
    }
  }
  return best;
}

inline NodeId greedy_step(const SmallWorldNet& net, NodeId x, NodeId t, bool use_al) {
  return greedy_choice(net, x, t, use_al).node;
}

namespace detail {

class Trace {
 public:
  Trace(Scheme scheme, NodeId source, std::uint64_t cap) : cap_(cap) {
    result_.scheme = scheme;
    result_.path.push_back(source);
  }

  NodeId current() const noexcept { return result_.path.back(); }
  bool exhausted() const noexcept { return result_.hops() >= cap_; }

  void hop(Hop h, bool long_range) {
    result_.path.push_back(h.node);
    result_.links.push_back(h.kind);
    ++(long_range ? result_.long_range_hops : result_.final_hops);
  }

  RouteResult finish(NodeId target) {
    result_.succeeded = current() == target;
    return std::move(result_);
  }

 private:
  RouteResult result_;
  std::uint64_t cap_;
};

inline void greedy_until(const SmallWorldNet& net, Trace& trace, NodeId t, bool use_al) {
  while (trace.current() != t && !trace.exhausted()) trace.hop(greedy_choice(net, trace.current(), t, use_al), false);
}

/// K-neighbour of u closest to t (first in stored order on ties).
inline NodeId best_k_neighbor(const SmallWorldNet& net, NodeId u, NodeId t) {
  const auto ks = net.k_neighbors(u);
  NodeId best = ks[0];
  for (const NodeId k : ks.subspan(1))
    if (net.distance(k, t) < net.distance(best, t)) best = k;
  return best;
}

inline void check_endpoints(const SmallWorldNet& net, NodeId s, NodeId t) {
  if (s >= net.size() || t >= net.size()) throw std::out_of_range("route endpoint out of range");
}

}  // namespace detail

/// Plain greedy forwarding; always reaches t within ring_distance(s, t) hops.
inline RouteResult route_greedy(const SmallWorldNet& net, NodeId s, NodeId t, const RoutingParams& params,
                                bool use_al, Scheme label = Scheme::greedy_q1) {
  detail::check_endpoints(net, s, t);
  detail::Trace trace(label, s, params.hop_cap_for(net.size()));
  detail::greedy_until(net, trace, t, use_al);
  return trace.finish(t);
}

/// Estimated greedy hops still needed from ring distance d: (1/2) ln n ln(d+1).
inline double greedy_cost_estimate(std::uint32_t n, std::uint32_t d) {
  return 0.5 * std::log(static_cast<double>(n)) * std::log1p(static_cast<double>(d));
}

/// Next hop of the local-awareness baseline. x knows its successors
/// x+1..x+m (m = ceil(lg n)) and their K-neighbours. Using the K-link of the
/// node i positions ahead costs i+1 hops; the option minimising hops spent
/// plus greedy_cost_estimate(landing distance) wins, with the plain R-step as
/// the fallback. Walking toward a chosen owner is an R-step, and the choice is
/// re-evaluated at every hop.
inline Hop local_awareness_step(const SmallWorldNet& net, NodeId x, NodeId t) {
  const auto n = net.size();
  const auto remaining = net.distance(x, t);
  const std::uint32_t window = id_bits(n);
  const Hop r_step{net.r_neighbor(x), LinkKind::ring};
  double best = 1.0 + greedy_cost_estimate(n, remaining - 1);
  Hop choice = r_step;
  NodeId w = x;
  for (std::uint32_t i = 0; i <= window && i < remaining; ++i, w = net.r_neighbor(w)) {
    for (const NodeId k : net.k_neighbors(w)) {
      const double cost = static_cast<double>(i + 1) + greedy_cost_estimate(n, net.distance(k, t));
      if (cost < best) best = cost, choice = i == 0 ? Hop{k, LinkKind::kleinberg} : r_step;
    }
  }
  return choice;
}

/// Scheme (c): lg n successor awareness with indirect greedy descent.
inline RouteResult route_local_awareness(const SmallWorldNet& net, NodeId s, NodeId t,
                                         const RoutingParams& params) {
  detail::check_endpoints(net, s, t);
  detail::Trace trace(Scheme::local_awareness, s, params.hop_cap_for(net.size()));
  while (trace.current() != t && !trace.exhausted()) trace.hop(local_awareness_step(net, trace.current(), t), false);
  return trace.finish(t);
}

/// Non-oblivious routing with a header stack of precomputed AL hops.
///
/// While the remaining distance is at least (lg n)^2 lg lg n: with an empty
/// stack, jump along the current node's K-link to y, pick the member of
/// A_y(depth) whose K-neighbour is closest to t (ties: lowest level, then
/// discovery order) and push the AL path from y to it; otherwise pop the next
/// hop. The jump is taken even when it moves away from t. Below the threshold
/// the message is forwarded greedily over all immediate neighbours.
inline RouteResult route_non_oblivious(const SmallWorldNet& net, NodeId s, NodeId t,
                                       const RoutingParams& params) {
  detail::check_endpoints(net, s, t);
  if (!net.augmented()) throw std::invalid_argument("non-oblivious routing requires an augmented network");
  const auto n = net.size();
  const int depth = params.depth_for(n);
  const double threshold = long_range_threshold(n);
  detail::Trace trace(Scheme::non_oblivious, s, params.hop_cap_for(n));
  std::vector<NodeId> header;  // back() is the top of the stack

  while (static_cast<double>(net.distance(trace.current(), t)) >= threshold && !trace.exhausted()) {
    if (header.empty()) {
      const NodeId y = detail::best_k_neighbor(net, trace.current(), t);
      trace.hop({y, LinkKind::kleinberg}, true);
      const auto aw = build_awareness(net, y, depth);
      std::size_t pick = 0;
      auto pick_d = std::numeric_limits<std::uint32_t>::max();
      const auto members = aw.members();
      for (std::size_t i = 0; i < members.size(); ++i) {
        const auto d = net.distance(detail::best_k_neighbor(net, members[i], t), t);
        if (d < pick_d) pick = i, pick_d = d;
      }
      const auto path = shortest_path(aw, members[pick]);
      header.assign(path.rbegin(), path.rend() - 1);
    } else {
      const NodeId next = header.back();
      header.pop_back();
      trace.hop({next, LinkKind::augmented}, true);
    }
  }
  detail::greedy_until(net, trace, t, true);
  return trace.finish(t);
}

/// First awareness member (lowest level, then discovery order) owning a
/// K-neighbour within half of the remaining distance from x to t.
inline std::optional<NodeId> find_good_intermediate(const Awareness& aw, const SmallWorldNet& net, NodeId x,
                                                    NodeId t) {
  const std::uint64_t remaining = net.distance(x, t);
  for (const NodeId z : aw.members())
    for (const NodeId k : net.k_neighbors(z))
      if (2 * std::uint64_t{net.distance(k, t)} <= remaining) return z;
  return std::nullopt;
}

/// Next hop of the oblivious scheme above the threshold; a function of
/// (x, t, network) alone.
inline Hop oblivious_step(const SmallWorldNet& net, NodeId x, NodeId t, int depth) {
  const auto aw = build_awareness(net, x, depth);
  const auto z = find_good_intermediate(aw, net, x, t);
  if (!z) return greedy_choice(net, x, t, true);
  if (*z == x) return {detail::best_k_neighbor(net, x, t), LinkKind::kleinberg};
  const auto path = shortest_path(aw, *z);
  return {path[1], LinkKind::augmented};
}

/// Oblivious routing: recompute A_x(depth) at every hop and head for the
/// nearest member with a half-distance K-link, until the distance drops below
/// c (lg n)^2 lg lg n; then forward greedily.
inline RouteResult route_oblivious(const SmallWorldNet& net, NodeId s, NodeId t, const RoutingParams& params) {
  detail::check_endpoints(net, s, t);
  if (!net.augmented()) throw std::invalid_argument("oblivious routing requires an augmented network");
  const auto n = net.size();
  const int depth = params.depth_for(n);
  const double threshold = params.c * long_range_threshold(n);
  detail::Trace trace(Scheme::oblivious, s, params.hop_cap_for(n));

  while (static_cast<double>(net.distance(trace.current(), t)) >= threshold && !trace.exhausted())
    trace.hop(oblivious_step(net, trace.current(), t, depth), true);
  detail::greedy_until(net, trace, t, true);
  return trace.finish(t);
}

/// Dispatch by scheme. Greedy and local-awareness schemes ignore AL-links.
inline RouteResult route(Scheme scheme, const SmallWorldNet& net, NodeId s, NodeId t, const RoutingParams& params) {
  switch (scheme) {
    case Scheme::greedy_q1:
    case Scheme::greedy_q2: return route_greedy(net, s, t, params, false, scheme);
    case Scheme::local_awareness: return route_local_awareness(net, s, t, params);
    case Scheme::non_oblivious: return route_non_oblivious(net, s, t, params);
    case Scheme::oblivious: return route_oblivious(net, s, t, params);
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace kswn
