#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "sap/errors.hpp"

namespace sap {

using Capacity = std::int64_t;

/// Directed network with integer capacities, a source and a sink.
/// Arcs into the source or out of the sink are rejected.
class FlowNetwork {
 public:
  struct Arc {
    int from;
    int to;
    Capacity capacity;
  };

  FlowNetwork(int node_count, int source, int sink) : node_count_(node_count), source_(source), sink_(sink) {
    if (node_count < 2 || source < 0 || sink < 0 || source >= node_count || sink >= node_count || source == sink)
      throw UsageError("invalid flow network endpoints");
  }

  int add_arc(int from, int to, Capacity capacity) {
    if (from < 0 || to < 0 || from >= node_count_ || to >= node_count_) throw UsageError("arc endpoint out of range");
    if (capacity < 0) throw UsageError("negative arc capacity");
    if (to == source_ || from == sink_) throw UsageError("arc into source or out of sink");
    arcs_.push_back({from, to, capacity});
    return static_cast<int>(arcs_.size()) - 1;
  }

  int node_count() const { return node_count_; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

 private:
  int node_count_;
  int source_;
  int sink_;
  std::vector<Arc> arcs_;
};

struct MaxFlowResult {
  Capacity value = 0;
  std::vector<Capacity> arc_flow;
  /// Nodes reachable from the source in the final residual graph: the
  /// source side of the inclusion-minimal minimum cut.
  std::vector<bool> min_cut_source_side;
  /// Complement of the nodes that reach the sink in the residual graph: the
  /// source side of the inclusion-maximal minimum cut.
  std::vector<bool> max_cut_source_side;
};

namespace detail {

class Dinic {
 public:
  explicit Dinic(const FlowNetwork& net) : n_(net.node_count()), head_(static_cast<std::size_t>(n_), -1) {
    for (const auto& a : net.arcs()) {
      push_edge(a.from, a.to, a.capacity);
      push_edge(a.to, a.from, 0);
    }
  }

  Capacity run(int s, int t) {
    Capacity total = 0;
    while (bfs(s, t)) {
      iter_ = head_;
      while (Capacity f = dfs(s, t, std::numeric_limits<Capacity>::max())) total += f;
    }
    return total;
  }

  Capacity flow_on(std::size_t arc) const { return cap_[2 * arc + 1]; }

  std::vector<bool> reachable_from(int s) const {
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int e = head_[static_cast<std::size_t>(u)]; e != -1; e = next_[static_cast<std::size_t>(e)]) {
        const int v = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e)] > 0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          stack.push_back(v);
        }
      }
    }
    return seen;
  }

  std::vector<bool> reaching(int t) const {
    // u reaches t in the residual graph iff some residual arc u->v with v reaching t.
    std::vector<bool> seen(static_cast<std::size_t>(n_), false);
    std::vector<int> stack{t};
    seen[static_cast<std::size_t>(t)] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int e = head_[static_cast<std::size_t>(v)]; e != -1; e = next_[static_cast<std::size_t>(e)]) {
        // e is v->u; its twin (e^1) is u->v.
        const int u = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e ^ 1)] > 0 && !seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = true;
          stack.push_back(u);
        }
      }
    }
    return seen;
  }

 private:
  void push_edge(int u, int v, Capacity c) {
    to_.push_back(v);
    cap_.push_back(c);
    next_.push_back(head_[static_cast<std::size_t>(u)]);
    head_[static_cast<std::size_t>(u)] = static_cast<int>(to_.size()) - 1;
  }

  bool bfs(int s, int t) {
    level_.assign(static_cast<std::size_t>(n_), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[static_cast<std::size_t>(u)]; e != -1; e = next_[static_cast<std::size_t>(e)]) {
        const int v = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e)] > 0 && level_[static_cast<std::size_t>(v)] < 0) {
          level_[static_cast<std::size_t>(v)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  // Iterative blocking-flow step: one augmenting path in the level graph.
  Capacity dfs(int s, int t, Capacity limit) {
    std::vector<int> path_edges;
    int u = s;
    while (true) {
      if (u == t) {
        Capacity f = limit;
        for (int e : path_edges) f = std::min(f, cap_[static_cast<std::size_t>(e)]);
        for (int e : path_edges) {
          cap_[static_cast<std::size_t>(e)] -= f;
          cap_[static_cast<std::size_t>(e ^ 1)] += f;
        }
        return f;
      }
      int& e = iter_[static_cast<std::size_t>(u)];
      while (e != -1) {
        const int v = to_[static_cast<std::size_t>(e)];
        if (cap_[static_cast<std::size_t>(e)] > 0 &&
            level_[static_cast<std::size_t>(v)] == level_[static_cast<std::size_t>(u)] + 1)
          break;
        e = next_[static_cast<std::size_t>(e)];
      }
      if (e == -1) {
        if (path_edges.empty()) return 0;
        // dead end: retreat and skip the edge that led here
        level_[static_cast<std::size_t>(u)] = -1;
        const int back = path_edges.back();
        path_edges.pop_back();
        u = to_[static_cast<std::size_t>(back ^ 1)];
        iter_[static_cast<std::size_t>(u)] = next_[static_cast<std::size_t>(iter_[static_cast<std::size_t>(u)])];
        continue;
      }
      path_edges.push_back(e);
      u = to_[static_cast<std::size_t>(e)];
    }
  }

  int n_;
  std::vector<int> head_, next_, to_, iter_, level_;
  std::vector<Capacity> cap_;
};

}  // namespace detail

/// Maximum s-t flow by blocking flows, plus both extreme minimum cuts.
inline MaxFlowResult max_flow(const FlowNetwork& net) {
  detail::Dinic dinic(net);
  MaxFlowResult r;
  r.value = dinic.run(net.source(), net.sink());
  r.arc_flow.resize(net.arcs().size());
  for (std::size_t i = 0; i < net.arcs().size(); ++i) r.arc_flow[i] = dinic.flow_on(i);
  r.min_cut_source_side = dinic.reachable_from(net.source());
  const auto to_sink = dinic.reaching(net.sink());
  r.max_cut_source_side.resize(to_sink.size());
  for (std::size_t i = 0; i < to_sink.size(); ++i) r.max_cut_source_side[i] = !to_sink[i];
  return r;
}

}  // namespace sap
