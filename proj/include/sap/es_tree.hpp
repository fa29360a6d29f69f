#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sap/errors.hpp"

namespace sap {

/// Depth-bounded shortest-path tree toward a fixed sink in a dynamic digraph.
///
/// Supports arc deletions, node deletions, and arc insertions that do not
/// shorten any distance to the sink. Nodes at distance > depth_limit (or
/// unable to reach the sink) sit at level `high()`. Levels never decrease.
class EsTree {
 public:
  EsTree(int node_count, int sink, int depth_limit, std::span<const std::pair<int, int>> arcs = {})
      : n_(node_count),
        sink_(sink),
        h_(depth_limit),
        out_(static_cast<std::size_t>(node_count)),
        in_(static_cast<std::size_t>(node_count)),
        level_(static_cast<std::size_t>(node_count), depth_limit + 1),
        parent_(static_cast<std::size_t>(node_count), -1),
        deleted_(static_cast<std::size_t>(node_count), 0) {
    if (depth_limit < 1) throw UsageError("depth limit must be >= 1");
    if (sink < 0 || sink >= node_count) throw UsageError("sink out of range");
    for (const auto& [u, v] : arcs) add_raw(u, v);
    level_ = truncated_bfs_levels();
    for (int v = 0; v < n_; ++v) parent_[static_cast<std::size_t>(v)] = pick_parent(v);
  }

  int node_count() const { return n_; }
  int sink() const { return sink_; }
  int depth_limit() const { return h_; }
  int high() const { return h_ + 1; }

  int level(int v) const { return level_.at(static_cast<std::size_t>(v)); }
  bool is_high(int v) const { return level(v) >= high(); }
  int parent(int v) const { return parent_.at(static_cast<std::size_t>(v)); }
  bool deleted(int v) const { return deleted_.at(static_cast<std::size_t>(v)) != 0; }
  const std::vector<int>& levels() const { return level_; }

  std::span<const int> out_arcs(int v) const { return out_.at(static_cast<std::size_t>(v)); }
  std::span<const int> in_arcs(int v) const { return in_.at(static_cast<std::size_t>(v)); }
  bool has_arc(int u, int v) const { return arcs_.count(key(u, v)) != 0; }
  std::size_t arc_count() const { return arcs_.size(); }

  /// Work counter: out-arc scans performed during repairs.
  std::int64_t scan_count() const { return scans_; }

  /// Adds u->v. Throws InvariantViolation if the arc would shorten u's
  /// distance to the sink; levels are unchanged otherwise.
  void insert_arc(int u, int v) {
    check_node(u);
    check_node(v);
    if (deleted(u) || deleted(v)) throw UsageError("arc endpoint is deleted");
    if (u == sink_) throw UsageError("sink has no out-arcs");
    if (has_arc(u, v)) throw UsageError("arc " + std::to_string(u) + "->" + std::to_string(v) + " already present");
    if (level(v) + 1 < level(u))
      throw InvariantViolation("inserting " + std::to_string(u) + "->" + std::to_string(v) +
                               " would decrease a distance to the sink");
    add_raw(u, v);
  }

  /// Removes u->v and raises levels that lost their last shortest route.
  void delete_arc(int u, int v) {
    check_node(u);
    check_node(v);
    if (!has_arc(u, v)) throw UsageError("arc " + std::to_string(u) + "->" + std::to_string(v) + " not present");
    remove_raw(u, v);
    Queue q;
    if (parent(u) == v) {
      parent_[static_cast<std::size_t>(u)] = -1;
      q.emplace(level(u), u);
    }
    repair(q);
  }

  /// Removes v with all incident arcs. v keeps level high() thereafter.
  void delete_node(int v) {
    check_node(v);
    if (v == sink_) throw UsageError("cannot delete the sink");
    if (deleted(v)) return;
    deleted_[static_cast<std::size_t>(v)] = 1;
    Queue q;
    for (int w : std::vector<int>(out_[static_cast<std::size_t>(v)])) remove_raw(v, w);
    for (int u : std::vector<int>(in_[static_cast<std::size_t>(v)])) {
      remove_raw(u, v);
      if (parent(u) == v) {
        parent_[static_cast<std::size_t>(u)] = -1;
        q.emplace(level(u), u);
      }
    }
    level_[static_cast<std::size_t>(v)] = high();
    parent_[static_cast<std::size_t>(v)] = -1;
    repair(q);
  }

  /// Node sequence from v to the sink along tree parents (v first, sink last).
  std::vector<int> tree_path(int v) const {
    if (is_high(v) || deleted(v)) throw UsageError("node " + std::to_string(v) + " is not in the tree");
    std::vector<int> path{v};
    while (path.back() != sink_) {
      const int p = parent(path.back());
      if (p < 0) throw InvariantViolation("broken tree parent chain");
      path.push_back(p);
    }
    return path;
  }

  /// Distances to the sink truncated at high(), by BFS over reversed arcs
  /// among non-deleted nodes. Independent of the incremental repair.
  std::vector<int> truncated_bfs_levels() const {
    std::vector<int> dist(static_cast<std::size_t>(n_), high());
    std::deque<int> q{sink_};
    dist[static_cast<std::size_t>(sink_)] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      if (dist[static_cast<std::size_t>(v)] >= h_) continue;
      for (int u : in_[static_cast<std::size_t>(v)]) {
        if (deleted_[static_cast<std::size_t>(u)] || dist[static_cast<std::size_t>(u)] != high()) continue;
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        q.push_back(u);
      }
    }
    return dist;
  }

  /// Levels equal truncated BFS distances and every in-tree parent is a
  /// live arc one level down.
  bool consistent() const {
    const auto ref = truncated_bfs_levels();
    for (int v = 0; v < n_; ++v) {
      if (deleted(v)) continue;
      if (ref[static_cast<std::size_t>(v)] != level(v)) return false;
      if (v == sink_ || is_high(v)) continue;
      const int p = parent(v);
      if (p < 0 || !has_arc(v, p) || level(p) != level(v) - 1) return false;
    }
    return true;
  }

 private:
  using Entry = std::pair<int, int>;  // (level at push time, node)
  using Queue = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

  static std::uint64_t key(int u, int v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
  }

  void check_node(int v) const {
    if (v < 0 || v >= n_) throw UsageError("node " + std::to_string(v) + " out of range");
  }

  void add_raw(int u, int v) {
    check_node(u);
    check_node(v);
    if (!arcs_.insert(key(u, v)).second) throw UsageError("duplicate arc");
    out_[static_cast<std::size_t>(u)].push_back(v);
    in_[static_cast<std::size_t>(v)].push_back(u);
  }

  static void erase_one(std::vector<int>& xs, int x) {
    const auto it = std::find(xs.begin(), xs.end(), x);
    *it = xs.back();
    xs.pop_back();
  }

  void remove_raw(int u, int v) {
    arcs_.erase(key(u, v));
    erase_one(out_[static_cast<std::size_t>(u)], v);
    erase_one(in_[static_cast<std::size_t>(v)], u);
  }

  // Smallest-index live out-neighbor exactly one level down, or -1.
  int pick_parent(int v) const {
    if (v == sink_ || deleted(v) || is_high(v)) return -1;
    int best = -1;
    for (int w : out_[static_cast<std::size_t>(v)])
      if (!deleted(w) && level(w) == level(v) - 1 && (best < 0 || w < best)) best = w;
    return best;
  }

  bool parent_valid(int v) const {
    const int p = parent(v);
    return p >= 0 && !deleted(p) && level(p) == level(v) - 1;
  }

  void repair(Queue& q) {
    while (!q.empty()) {
      const int x = q.top().second;
      q.pop();
      if (x == sink_ || deleted(x) || is_high(x) || parent_valid(x)) continue;
      ++scans_;
      int best = high();
      for (int w : out_[static_cast<std::size_t>(x)])
        if (!deleted(w)) best = std::min(best, level(w) + 1);
      best = std::min(best, high());
      if (best < level(x)) throw InvariantViolation("level would decrease during repair");
      const bool raised = best > level(x);
      level_[static_cast<std::size_t>(x)] = best;
      parent_[static_cast<std::size_t>(x)] = pick_parent(x);
      if (!raised) continue;
      for (int y : in_[static_cast<std::size_t>(x)])
        if (parent(y) == x) q.emplace(level(y), y);
    }
  }

  int n_;
  int sink_;
  int h_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::unordered_set<std::uint64_t> arcs_;
  std::vector<int> level_;
  std::vector<int> parent_;
  std::vector<char> deleted_;
  std::int64_t scans_ = 0;
};

}  // namespace sap
