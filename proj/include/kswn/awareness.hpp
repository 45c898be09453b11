#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kswn/netgen.hpp"

namespace kswn {

/// Bounded-depth AL neighbourhood of one node.
///
/// `members` is the union of all levels in BFS discovery order, so a
/// member's index doubles as its discovery rank. Levels hold only nodes that
/// were new at that level. Awareness sets are small (at most 2^(k+1) - 1
/// nodes), so membership is a linear scan over a contiguous vector.
class Awareness {
 public:
  NodeId origin() const noexcept { return members_.front(); }
  int depth() const noexcept { return depth_; }
  std::span<const NodeId> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }

  int level_count() const noexcept { return static_cast<int>(level_begin_.size()) - 1; }

  /// Nodes first discovered at level i.
  std::span<const NodeId> level(int i) const {
    const auto b = level_begin_.at(static_cast<std::size_t>(i));
    const auto e = level_begin_.at(static_cast<std::size_t>(i) + 1);
    return std::span<const NodeId>(members_).subspan(b, e - b);
  }

  /// Discovery rank of v, or -1 when v is not a member.
  std::ptrdiff_t index_of(NodeId v) const noexcept {
    const auto it = std::find(members_.begin(), members_.end(), v);
    return it == members_.end() ? -1 : it - members_.begin();
  }

  bool contains(NodeId v) const noexcept { return index_of(v) >= 0; }

  int level_of(NodeId v) const { return levels_[checked_index(v)]; }

  /// BFS parent of v; the origin is its own parent.
  NodeId parent(NodeId v) const { return members_[parents_[checked_index(v)]]; }

  int level_of_index(std::size_t i) const { return levels_.at(i); }

 private:
  friend Awareness build_awareness(const SmallWorldNet&, NodeId, int);

  std::size_t checked_index(NodeId v) const {
    const auto i = index_of(v);
    if (i < 0) throw std::out_of_range("unknown node " + std::to_string(v) + " in awareness");
    return static_cast<std::size_t>(i);
  }

  int depth_ = 0;
  std::vector<NodeId> members_;
  std::vector<std::uint32_t> parents_;  // index into members_
  std::vector<int> levels_;
  std::vector<std::size_t> level_begin_;  // level i spans [level_begin_[i], level_begin_[i+1])
};

/// Breadth-first traversal over AL-links from x, truncated after `depth`
/// levels. Nodes are expanded in discovery order and AL-links in stored
/// order; the first discoverer becomes the parent.
inline Awareness build_awareness(const SmallWorldNet& net, NodeId x, int depth) {
  if (!net.augmented()) throw std::invalid_argument("awareness requires an augmented network");
  if (depth < 0) throw std::invalid_argument("awareness depth must be non-negative");
  if (x >= net.size()) throw std::out_of_range("node id out of range");

  Awareness aw;
  aw.depth_ = depth;
  const std::size_t cap = (std::size_t{1} << std::min(depth + 1, 20)) - 1;
  aw.members_.reserve(std::min<std::size_t>(cap, net.size()));
  aw.members_.push_back(x);
  aw.parents_.push_back(0);
  aw.levels_.push_back(0);
  aw.level_begin_ = {0, 1};

  for (int lvl = 1; lvl <= depth; ++lvl) {
    const auto begin = aw.level_begin_[static_cast<std::size_t>(lvl - 1)];
    const auto end = aw.level_begin_[static_cast<std::size_t>(lvl)];
    for (auto i = begin; i < end; ++i) {
      for (const NodeId v : net.al_neighbors(aw.members_[i])) {
        if (aw.contains(v)) continue;
        aw.members_.push_back(v);
        aw.parents_.push_back(static_cast<std::uint32_t>(i));
        aw.levels_.push_back(lvl);
      }
    }
    aw.level_begin_.push_back(aw.members_.size());
  }
  return aw;
}

/// Minimum-hop AL-path [origin, ..., z] inside the awareness.
inline std::vector<NodeId> shortest_path(const Awareness& aw, NodeId z) {
  if (!aw.contains(z)) throw std::out_of_range("unknown node " + std::to_string(z) + " in awareness");
  std::vector<NodeId> path;
  path.reserve(static_cast<std::size_t>(aw.level_of(z)) + 1);
  for (NodeId v = z; v != aw.origin(); v = aw.parent(v)) path.push_back(v);
  path.push_back(aw.origin());
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace kswn
