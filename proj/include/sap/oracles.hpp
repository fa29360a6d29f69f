#pragma once

// Reference implementations used only for validation. Nothing here calls into
// the engines or the flow machinery; every traversal is written out locally.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "sap/errors.hpp"
#include "sap/instance.hpp"
#include "sap/matching.hpp"
#include "sap/rational.hpp"

namespace sap::oracle {

/// Static bipartite graph, client-side adjacency.
struct GraphSnapshot {
  std::size_t server_count = 0;
  std::vector<std::vector<ServerId>> adjacency;

  static GraphSnapshot of_prefix(const ArrivalInstance& instance, std::size_t prefix) {
    GraphSnapshot g;
    g.server_count = instance.server_count();
    for (std::size_t c = 0; c < prefix; ++c) {
      const auto nb = instance.neighbors(static_cast<ClientId>(c));
      g.adjacency.emplace_back(nb.begin(), nb.end());
    }
    return g;
  }
};

/// Maximum matching size by Hopcroft-Karp phases.
inline std::size_t hopcroft_karp_size(const GraphSnapshot& g) {
  const std::size_t nc = g.adjacency.size();
  constexpr int kFree = -1;
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> mate_c(nc, kFree), mate_s(g.server_count, kFree), dist(nc, kInf);
  std::size_t size = 0;

  auto bfs = [&] {
    std::deque<std::size_t> q;
    bool reach_free = false;
    for (std::size_t c = 0; c < nc; ++c) {
      dist[c] = mate_c[c] == kFree ? 0 : kInf;
      if (mate_c[c] == kFree) q.push_back(c);
    }
    while (!q.empty()) {
      const std::size_t c = q.front();
      q.pop_front();
      for (ServerId s : g.adjacency[c]) {
        const int m = mate_s[static_cast<std::size_t>(s)];
        if (m == kFree) {
          reach_free = true;
        } else if (dist[static_cast<std::size_t>(m)] == kInf) {
          dist[static_cast<std::size_t>(m)] = dist[c] + 1;
          q.push_back(static_cast<std::size_t>(m));
        }
      }
    }
    return reach_free;
  };

  // Recursive DFS along the layered graph; depth is bounded by matching size.
  std::vector<std::size_t> it(nc, 0);
  auto dfs = [&](auto&& self, std::size_t c) -> bool {
    for (std::size_t& i = it[c]; i < g.adjacency[c].size(); ++i) {
      const ServerId s = g.adjacency[c][i];
      const int m = mate_s[static_cast<std::size_t>(s)];
      if (m == kFree || (dist[static_cast<std::size_t>(m)] == dist[c] + 1 && self(self, static_cast<std::size_t>(m)))) {
        mate_c[c] = s;
        mate_s[static_cast<std::size_t>(s)] = static_cast<int>(c);
        return true;
      }
    }
    dist[c] = kInf;
    return false;
  };

  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (std::size_t c = 0; c < nc; ++c)
      if (mate_c[c] == kFree && dfs(dfs, c)) ++size;
  }
  return size;
}

struct RatioResult {
  Rational lambda;
  std::vector<int> tight;  // client indices, ascending
};

/// max |K|/|N(K)| over all nonempty K by subset enumeration; the tight set is
/// the union of all maximizers.
inline RatioResult brute_max_ratio(const GraphSnapshot& g) {
  const std::size_t nc = g.adjacency.size();
  if (nc == 0) throw UsageError("brute_max_ratio of an empty client set");
  if (nc > 20) throw UsageError("brute_max_ratio limited to 20 clients");
  if (g.server_count > 64) throw UsageError("brute_max_ratio limited to 64 servers");
  std::vector<std::uint64_t> nmask(nc, 0);
  for (std::size_t c = 0; c < nc; ++c) {
    if (g.adjacency[c].empty()) throw UsageError("client without neighbors");
    for (ServerId s : g.adjacency[c]) nmask[c] |= std::uint64_t{1} << s;
  }
  std::int64_t best_k = 0, best_n = 1;
  std::uint64_t union_mask = 0;
  const std::uint64_t subsets = std::uint64_t{1} << nc;
  for (std::uint64_t K = 1; K < subsets; ++K) {
    std::uint64_t nb = 0;
    for (std::size_t c = 0; c < nc; ++c)
      if (K >> c & 1) nb |= nmask[c];
    const std::int64_t k = std::popcount(K);
    const std::int64_t n = std::popcount(nb);
    // compare k/n with best_k/best_n
    if (k * best_n > best_k * n) {
      best_k = k;
      best_n = n;
      union_mask = K;
    } else if (k * best_n == best_k * n) {
      union_mask |= K;
    }
  }
  RatioResult r{Rational(best_k, best_n), {}};
  for (std::size_t c = 0; c < nc; ++c)
    if (union_mask >> c & 1) r.tight.push_back(static_cast<int>(c));
  return r;
}

/// Balanced-flow loads by peeling with brute_max_ratio; no flow computation.
inline std::vector<Rational> oracle_balanced_flow(const GraphSnapshot& g) {
  if (g.adjacency.size() > 16) throw UsageError("oracle_balanced_flow limited to 16 clients");
  std::vector<Rational> alpha(g.server_count, Rational(0));
  std::vector<char> client_left(g.adjacency.size(), 1), server_left(g.server_count, 1);
  while (std::count(client_left.begin(), client_left.end(), 1) > 0) {
    GraphSnapshot rest;
    rest.server_count = g.server_count;
    std::vector<std::size_t> index;
    for (std::size_t c = 0; c < g.adjacency.size(); ++c) {
      if (!client_left[c]) continue;
      std::vector<ServerId> nb;
      for (ServerId s : g.adjacency[c])
        if (server_left[static_cast<std::size_t>(s)]) nb.push_back(s);
      rest.adjacency.push_back(std::move(nb));
      index.push_back(c);
    }
    const auto r = brute_max_ratio(rest);
    for (int i : r.tight) {
      client_left[index[static_cast<std::size_t>(i)]] = 0;
      for (ServerId s : rest.adjacency[static_cast<std::size_t>(i)]) {
        alpha[static_cast<std::size_t>(s)] = r.lambda;
        server_left[static_cast<std::size_t>(s)] = 0;
      }
    }
  }
  return alpha;
}

/// Copy of a matching with just what a search needs.
struct MatchSnapshot {
  GraphSnapshot graph;
  std::vector<int> server_of_client;   // -1 when unmatched
  std::vector<std::int32_t> capacity;
  std::vector<std::int32_t> load;

  static MatchSnapshot of(const MatchState& state, const ArrivalInstance& instance) {
    MatchSnapshot m;
    m.graph = GraphSnapshot::of_prefix(instance, state.arrived_count());
    for (const auto& s : state.server_of_client()) m.server_of_client.push_back(s ? *s : -1);
    m.capacity.assign(state.capacities().begin(), state.capacities().end());
    m.load.assign(instance.server_count(), 0);
    for (int s : m.server_of_client)
      if (s >= 0) ++m.load[static_cast<std::size_t>(s)];
    return m;
  }
};

/// Edge count of a shortest augmenting path from the unmatched client `c`,
/// by plain BFS over (vertex, distance).
inline std::optional<std::int64_t> oracle_shortest_aug_path(const MatchSnapshot& m, ClientId c) {
  const std::size_t nc = m.graph.adjacency.size();
  if (c < 0 || static_cast<std::size_t>(c) >= nc) throw UsageError("client not in snapshot");
  if (m.server_of_client[static_cast<std::size_t>(c)] >= 0) throw UsageError("client already matched");
  // clients of each server, built from the snapshot
  std::vector<std::vector<int>> holders(m.graph.server_count);
  for (std::size_t i = 0; i < nc; ++i)
    if (m.server_of_client[i] >= 0) holders[static_cast<std::size_t>(m.server_of_client[i])].push_back(static_cast<int>(i));

  // vertex ids: clients 0..nc-1, servers nc..nc+S-1
  std::vector<std::int64_t> dist(nc + m.graph.server_count, -1);
  std::deque<std::size_t> q{static_cast<std::size_t>(c)};
  dist[static_cast<std::size_t>(c)] = 0;
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop_front();
    if (v < nc) {
      for (ServerId s : m.graph.adjacency[v]) {
        if (s == m.server_of_client[v]) continue;
        const std::size_t w = nc + static_cast<std::size_t>(s);
        if (dist[w] >= 0) continue;
        dist[w] = dist[v] + 1;
        if (m.load[static_cast<std::size_t>(s)] < m.capacity[static_cast<std::size_t>(s)]) return dist[w];
        q.push_back(w);
      }
    } else {
      for (int u : holders[v - nc]) {
        if (dist[static_cast<std::size_t>(u)] >= 0) continue;
        dist[static_cast<std::size_t>(u)] = dist[v] + 1;
        q.push_back(static_cast<std::size_t>(u));
      }
    }
  }
  return std::nullopt;
}

}  // namespace sap::oracle
