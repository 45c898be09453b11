#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kswn/experiments.hpp"
#include "kswn/routing.hpp"
#include "test_util.hpp"

using namespace kswn;
using kswn::testing::make_net;

namespace {

std::vector<std::pair<NodeId, NodeId>> random_pairs(std::uint32_t n, std::size_t count, std::uint64_t seed) {
  return draw_queries(n, seed, 1, count);
}

double lg(double n) { return std::log2(n); }

double mean_hops(Scheme scheme, const SmallWorldNet& net, const std::vector<std::pair<NodeId, NodeId>>& pairs) {
  double sum = 0.0;
  for (const auto& [s, t] : pairs) {
    const auto r = route(scheme, net, s, t, {});
    EXPECT_TRUE(r.succeeded);
    sum += static_cast<double>(r.hops());
  }
  return sum / static_cast<double>(pairs.size());
}

// AL(0)={3,7}, AL(3)={5,9}, AL(7)={9,12}, other AL-links to u+1; K-links from
// `k_special`, defaulting to u+1.
SmallWorldNet intermediate_net(std::map<NodeId, NodeId> k_special) {
  return make_net(
      1024,
      [k_special](NodeId u) {
        const auto it = k_special.find(u);
        return std::vector<NodeId>{it != k_special.end() ? it->second : (u + 1) % 1024};
      },
      [](NodeId u) -> std::vector<NodeId> {
        switch (u) {
          case 0: return {3, 7};
          case 3: return {5, 9};
          case 7: return {9, 12};
          default: return {(u + 1) % 1024, (u + 1) % 1024};
        }
      },
      100);
}

}  // namespace

TEST(GreedyStep, DirectedDistanceExamples) {
  const auto far = make_net(1024, [](NodeId u) { return std::vector<NodeId>{u == 0 ? 400u : (u + 2) % 1024}; });
  EXPECT_EQ(greedy_step(far, 0, 100, false), 1u);
  const auto near = make_net(1024, [](NodeId u) { return std::vector<NodeId>{u == 0 ? 90u : (u + 2) % 1024}; });
  EXPECT_EQ(greedy_step(near, 0, 100, false), 90u);
  EXPECT_EQ(greedy_step(near, 99, 100, false), 100u);
  EXPECT_EQ(greedy_choice(near, 0, 100, false).kind, LinkKind::kleinberg);
}

TEST(GreedyStep, TiesPreferRingThenStoredOrder) {
  const auto net = make_net(
      64, [](NodeId u) { return std::vector<NodeId>{(u + 1) % 64, (u + 1) % 64}; },
      [](NodeId u) { return std::vector<NodeId>{(u + 1) % 64, (u + 1) % 64}; });
  EXPECT_EQ(greedy_choice(net, 0, 30, true).kind, LinkKind::ring);
}

TEST(GreedyStep, UsesAlLinksOnlyWhenAsked) {
  const auto net = make_net(
      64, [](NodeId u) { return std::vector<NodeId>{(u + 63) % 64}; },
      [](NodeId u) { return std::vector<NodeId>{(u + 5) % 64, (u + 9) % 64}; });
  EXPECT_EQ(greedy_step(net, 0, 30, false), 1u);
  EXPECT_EQ(greedy_step(net, 0, 30, true), 9u);
  EXPECT_EQ(greedy_step(net, 0, 7, true), 5u);
}

TEST(GreedyStep, ArgminInvariantUnderFartherNeighbours) {
  Engine rng(5);
  const auto base = build_network({512, 1, true, std::nullopt, 9});
  for (int i = 0; i < 300; ++i) {
    const auto x = static_cast<NodeId>(uniform_below(rng, 512));
    auto t = static_cast<NodeId>(uniform_below(rng, 512));
    if (t == x) t = (t + 1) % 512;
    const auto choice = greedy_step(base, x, t, true);
    const auto best_d = ring_distance(choice, t, 512);
    // A distance in (best_d, 511] always exists unless best_d is already maximal.
    if (best_d >= 511) continue;
    const auto extra_d = best_d + 1 + static_cast<std::uint32_t>(uniform_below(rng, 511 - best_d));
    const NodeId extra = (t + 512 - extra_d) % 512;
    const auto widened = make_net(
        512,
        [&](NodeId u) {
          return std::vector<NodeId>{base.k_neighbors(u)[0], u == x ? extra : base.k_neighbors(u)[0]};
        },
        [&](NodeId u) { return std::vector<NodeId>{base.al_neighbors(u)[0], base.al_neighbors(u)[1]}; }, 81);
    EXPECT_EQ(greedy_step(widened, x, t, true), choice);
  }
}

TEST(RouteGreedy, SourceEqualsTarget) {
  const auto net = build_network({64, 1, false, std::nullopt, 1});
  const auto r = route_greedy(net, 5, 5, {}, false);
  EXPECT_TRUE(r.succeeded);
  EXPECT_EQ(r.hops(), 0u);
  EXPECT_EQ(r.path, std::vector<NodeId>{5});
}

TEST(RouteGreedy, BackwardLinksFallBackToRing) {
  const auto net = make_net(256, [](NodeId u) { return std::vector<NodeId>{(u + 255) % 256}; });
  const auto r = route_greedy(net, 10, 200, {}, false);
  EXPECT_TRUE(r.succeeded);
  EXPECT_EQ(r.hops(), 190u);
  for (const auto k : r.links) EXPECT_EQ(k, LinkKind::ring);
}

TEST(RouteGreedy, StrictProgressAndValidTraces) {
  const auto net = build_network({4096, 1, true, std::nullopt, 3});
  for (const auto& [s, t] : random_pairs(4096, 500, 1)) {
    for (const bool use_al : {false, true}) {
      const auto r = route_greedy(net, s, t, {}, use_al);
      ASSERT_TRUE(r.succeeded);
      EXPECT_LE(r.hops(), ring_distance(s, t, 4096));
      EXPECT_TRUE(trace_is_valid(net, r));
      for (std::size_t i = 1; i < r.path.size(); ++i)
        EXPECT_LT(net.distance(r.path[i], t), net.distance(r.path[i - 1], t));
    }
  }
}

TEST(RouteGreedy, MeanHopsOnLgSquaredScale) {
  const std::uint32_t n = 1u << 14;
  const auto net = build_network({n, 1, false, std::nullopt, 21});
  const double mean = mean_hops(Scheme::greedy_q1, net, random_pairs(n, 2000, 4));
  EXPECT_GE(mean, 0.05 * lg(n) * lg(n));
  EXPECT_LE(mean, 1.5 * lg(n) * lg(n));
}

TEST(RouteLocalAwareness, SourceEqualsTarget) {
  const auto net = build_network({64, 1, false, std::nullopt, 1});
  EXPECT_EQ(route_local_awareness(net, 9, 9, {}).hops(), 0u);
}

TEST(RouteLocalAwareness, MonotoneForwardProgress) {
  const auto net = build_network({4096, 1, true, std::nullopt, 8});
  for (const auto& [s, t] : random_pairs(4096, 500, 2)) {
    const auto r = route_local_awareness(net, s, t, {});
    ASSERT_TRUE(r.succeeded);
    EXPECT_TRUE(trace_is_valid(net, r));
    EXPECT_LE(r.hops(), ring_distance(s, t, 4096));
    for (std::size_t i = 1; i < r.path.size(); ++i) EXPECT_LT(net.distance(r.path[i], t), net.distance(r.path[i - 1], t));
    for (const auto k : r.links) EXPECT_NE(k, LinkKind::augmented);
  }
  // Target inside the successor window.
  const auto r = route_local_awareness(net, 100, 105, {});
  EXPECT_LE(r.hops(), 5u);
}

TEST(RouteLocalAwareness, WalksToSuccessorWithBetterLink) {
  // Only node 3 has a useful K-link; everything else points backward.
  const auto net = make_net(4096, [](NodeId u) { return std::vector<NodeId>{u == 3 ? 3000u : (u + 4095) % 4096}; });
  const auto r = route_local_awareness(net, 0, 3001, {});
  ASSERT_GE(r.path.size(), 5u);
  EXPECT_EQ(r.path[3], 3u);
  EXPECT_EQ(r.path[4], 3000u);
  EXPECT_EQ(r.links[3], LinkKind::kleinberg);
  EXPECT_EQ(r.hops(), 5u);
}

TEST(RouteLocalAwareness, BeatsGreedyOnPairedTrials) {
  const std::uint32_t n = 1u << 14;
  const auto net = build_network({n, 1, true, std::nullopt, 13});
  const auto pairs = random_pairs(n, 2000, 6);
  EXPECT_LT(mean_hops(Scheme::local_awareness, net, pairs), mean_hops(Scheme::greedy_q1, net, pairs));
}

TEST(RouteNonOblivious, BelowThresholdIsGreedyWithAl) {
  const auto net = build_network({4096, 1, true, std::nullopt, 2});
  const auto threshold = long_range_threshold(4096);
  for (const auto& [s, t] : random_pairs(4096, 400, 3)) {
    if (ring_distance(s, t, 4096) >= threshold) continue;
    const auto a = route_non_oblivious(net, s, t, {});
    const auto b = route_greedy(net, s, t, {}, true);
    EXPECT_EQ(a.path, b.path);
    EXPECT_EQ(a.long_range_hops, 0u);
  }
}

TEST(RouteNonOblivious, LandingNodeIsBestIntermediate) {
  // From 0 the K-link lands on 200, whose own K-link (to 850) beats every other
  // member of A_200, so nothing is pushed and the next hop is 200's K-link.
  std::map<NodeId, NodeId> k{{0, 200}, {200, 850}};
  const auto net = make_net(
      1024,
      [&](NodeId u) {
        const auto it = k.find(u);
        return std::vector<NodeId>{it != k.end() ? it->second : (u + 1) % 1024};
      },
      [](NodeId u) { return std::vector<NodeId>{(u + 1) % 1024, (u + 2) % 1024}; }, 100);
  const auto r = route_non_oblivious(net, 0, 900, {});
  ASSERT_TRUE(r.succeeded);
  ASSERT_GE(r.path.size(), 3u);
  EXPECT_EQ(r.path[1], 200u);
  EXPECT_EQ(r.path[2], 850u);
  EXPECT_EQ(r.links[0], LinkKind::kleinberg);
  EXPECT_EQ(r.links[1], LinkKind::kleinberg);
  EXPECT_EQ(r.long_range_hops, 2u);
  EXPECT_EQ(r.final_hops, 25u);  // 50 remaining, two positions per AL hop
}

TEST(RouteNonOblivious, HeaderDisciplineMatchesIndependentReplay) {
  const std::uint32_t n = 1u << 14;
  const auto net = build_network({n, 1, true, std::nullopt, 31});
  const int depth = default_awareness_depth(n);
  const double threshold = long_range_threshold(n);
  for (const auto& [s, t] : random_pairs(n, 300, 9)) {
    const auto r = route_non_oblivious(net, s, t, {});
    ASSERT_TRUE(r.succeeded);
    ASSERT_TRUE(trace_is_valid(net, r));
    // Rebuild the expected long-range prefix: K-hop, then the AL path to the
    // member whose K-link is closest to t, repeated.
    std::size_t i = 0;
    while (i < r.long_range_hops) {
      ASSERT_EQ(r.links[i], LinkKind::kleinberg) << "stack not consumed before K-hop";
      const NodeId y = r.path[i + 1];
      const auto aw = build_awareness(net, y, depth);
      NodeId z = y;
      for (const NodeId m : aw.members())
        if (net.distance(net.k_neighbors(m)[0], t) < net.distance(net.k_neighbors(z)[0], t)) z = m;
      const auto path = shortest_path(aw, z);
      ++i;
      for (std::size_t j = 1; j < path.size() && i < r.long_range_hops; ++j, ++i) {
        ASSERT_EQ(r.links[i], LinkKind::augmented);
        ASSERT_EQ(r.path[i + 1], path[j]);
      }
    }
    for (std::size_t j = r.long_range_hops; j < r.links.size(); ++j)
      EXPECT_LT(net.distance(r.path[j], t), threshold);
  }
}

TEST(RouteNonOblivious, RejectsPlainNetwork) {
  const auto net = build_network({1024, 1, false, std::nullopt, 1});
  EXPECT_THROW(route_non_oblivious(net, 0, 500, {}), std::invalid_argument);
  EXPECT_THROW(route_oblivious(net, 0, 500, {}), std::invalid_argument);
}

TEST(RouteNonOblivious, HopCapReportsFailure) {
  const auto net = build_network({1u << 14, 1, true, std::nullopt, 1});
  RoutingParams p;
  p.hop_cap = 3;
  const auto r = route_non_oblivious(net, 0, 9000, p);
  EXPECT_FALSE(r.succeeded);
  EXPECT_EQ(r.hops(), 3u);
  EXPECT_TRUE(trace_is_valid(net, r));
}

TEST(FindGoodIntermediate, NoneWhenNothingQualifies) {
  const auto net = intermediate_net({});
  const auto aw = build_awareness(net, 0, 2);
  EXPECT_FALSE(find_good_intermediate(aw, net, 0, 600).has_value());
}

TEST(FindGoodIntermediate, OriginItselfWins) {
  const auto net = intermediate_net({{0, 590}, {7, 550}});
  const auto aw = build_awareness(net, 0, 2);
  EXPECT_EQ(find_good_intermediate(aw, net, 0, 600), 0u);
  EXPECT_EQ(oblivious_step(net, 0, 600, 2).node, 590u);
  EXPECT_EQ(oblivious_step(net, 0, 600, 2).kind, LinkKind::kleinberg);
}

TEST(FindGoodIntermediate, LowestLevelWins) {
  const auto net = intermediate_net({{12, 590}, {7, 550}});
  const auto aw = build_awareness(net, 0, 2);
  EXPECT_EQ(find_good_intermediate(aw, net, 0, 600), 7u);
  const auto only_deep = intermediate_net({{12, 590}});
  const auto aw2 = build_awareness(only_deep, 0, 2);
  EXPECT_EQ(find_good_intermediate(aw2, only_deep, 0, 600), 12u);
  // The step heads along the AL path 0 -> 7 -> 12.
  EXPECT_EQ(oblivious_step(only_deep, 0, 600, 2).node, 7u);
  EXPECT_EQ(oblivious_step(only_deep, 0, 600, 2).kind, LinkKind::augmented);
}

TEST(FindGoodIntermediate, HalfDistanceBoundaryIsInclusive) {
  // Remaining 600; K(7) lands exactly 300 short of t.
  const auto net = intermediate_net({{7, 300}});
  const auto aw = build_awareness(net, 0, 2);
  EXPECT_EQ(find_good_intermediate(aw, net, 0, 600), 7u);
  const auto miss = intermediate_net({{7, 299}});
  EXPECT_FALSE(find_good_intermediate(build_awareness(miss, 0, 2), miss, 0, 600).has_value());
}

TEST(RouteOblivious, SourceEqualsTarget) {
  const auto net = build_network({1024, 1, true, std::nullopt, 1});
  EXPECT_EQ(route_oblivious(net, 77, 77, {}).hops(), 0u);
}

TEST(RouteOblivious, ReplayFromAnyHopReproducesSuffix) {
  const std::uint32_t n = 1u << 14;
  const auto net = build_network({n, 1, true, std::nullopt, 17});
  Engine rng(3);
  for (const auto& [s, t] : random_pairs(n, 100, 12)) {
    const auto r = route_oblivious(net, s, t, {});
    ASSERT_TRUE(r.succeeded);
    ASSERT_TRUE(trace_is_valid(net, r));
    const auto cut = static_cast<std::size_t>(uniform_below(rng, r.path.size()));
    const auto again = route_oblivious(net, r.path[cut], t, {});
    EXPECT_TRUE(std::equal(again.path.begin(), again.path.end(), r.path.begin() + static_cast<std::ptrdiff_t>(cut),
                           r.path.end()));
    EXPECT_EQ(again.path.size(), r.path.size() - cut);
  }
}

TEST(RouteOblivious, LargeCDegeneratesToGreedy) {
  const auto net = build_network({4096, 1, true, std::nullopt, 4});
  RoutingParams p;
  p.c = 1000.0;
  for (const auto& [s, t] : random_pairs(4096, 100, 5))
    EXPECT_EQ(route_oblivious(net, s, t, p).path, route_greedy(net, s, t, p, true).path);
}

TEST(NearOptimal, NoFailuresAtDefaults) {
  const std::uint32_t n = 1u << 14;
  const auto net = build_network({n, 1, true, std::nullopt, 101});
  const auto pairs = random_pairs(n, 10'000, 77);
  for (const auto scheme : {Scheme::non_oblivious, Scheme::oblivious}) {
    const auto st = route_queries(scheme, net, pairs, {});
    EXPECT_EQ(st.failures, 0u) << scheme_name(scheme);
  }
}

TEST(NearOptimal, HopsPerLgLglgFlatWithin35Percent) {
  for (const auto scheme : {Scheme::non_oblivious, Scheme::oblivious}) {
    std::vector<double> ratio;
    for (const std::uint32_t n : {1u << 12, 1u << 14, 1u << 16}) {
      const auto net = build_network({n, 1, true, std::nullopt, 5});
      ratio.push_back(mean_hops(scheme, net, random_pairs(n, 2000, 8)) / (lg(n) * lg(lg(n))));
    }
    const double mid = std::accumulate(ratio.begin(), ratio.end(), 0.0) / 3.0;
    for (const double r : ratio) {
      EXPECT_GE(r, 0.65 * mid) << scheme_name(scheme);
      EXPECT_LE(r, 1.35 * mid) << scheme_name(scheme);
    }
  }
}

TEST(Schemes, NamesRoundTrip) {
  for (const auto s : kAllSchemes) EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  EXPECT_FALSE(parse_scheme("flooding").has_value());
}
