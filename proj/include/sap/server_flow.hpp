#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sap/errors.hpp"
#include "sap/instance.hpp"
#include "sap/max_flow.hpp"
#include "sap/rational.hpp"

namespace sap {

/// A static client set with neighbor lists over `server_count` servers.
/// `ids[i]` is the original client id of local client i.
struct ClientGraph {
  std::size_t server_count = 0;
  std::vector<std::vector<ServerId>> neighbors;
  std::vector<ClientId> ids;

  std::size_t client_count() const { return neighbors.size(); }

  /// Arrived clients of the first `prefix` arrivals that have at least one neighbor.
  static ClientGraph from_prefix(const ArrivalInstance& instance, std::size_t prefix) {
    if (prefix > instance.client_count()) throw UsageError("prefix longer than instance");
    ClientGraph g;
    g.server_count = instance.server_count();
    for (std::size_t c = 0; c < prefix; ++c) {
      const auto nb = instance.neighbors(static_cast<ClientId>(c));
      if (nb.empty()) continue;
      g.neighbors.emplace_back(nb.begin(), nb.end());
      g.ids.push_back(static_cast<ClientId>(c));
    }
    return g;
  }

  static ClientGraph from_clients(const ArrivalInstance& instance, std::span<const ClientId> clients) {
    ClientGraph g;
    g.server_count = instance.server_count();
    for (ClientId c : clients) {
      const auto nb = instance.neighbors(c);
      g.neighbors.emplace_back(nb.begin(), nb.end());
      g.ids.push_back(c);
    }
    return g;
  }

  /// Servers adjacent to at least one client.
  std::vector<ServerId> covered_servers() const {
    std::vector<char> hit(server_count, 0);
    for (const auto& nb : neighbors)
      for (ServerId s : nb) hit[static_cast<std::size_t>(s)] = 1;
    std::vector<ServerId> out;
    for (std::size_t s = 0; s < server_count; ++s)
      if (hit[s]) out.push_back(static_cast<ServerId>(s));
    return out;
  }

  void require_nonempty_neighborhoods() const {
    for (std::size_t i = 0; i < neighbors.size(); ++i)
      if (neighbors[i].empty())
        throw UsageError("client " + std::to_string(ids.empty() ? static_cast<ClientId>(i) : ids[i]) +
                         " has no neighbors; flows are undefined");
  }
};

namespace detail {

struct LoadNetwork {
  FlowNetwork net;
  std::vector<int> client_arc;  // first client->server arc id per client (arcs follow neighbor order)
};

// source -> client (q), client -> server (q * |C|), server -> sink (p).
inline LoadNetwork load_network(const ClientGraph& g, Capacity per_client, Capacity per_server) {
  const int nc = static_cast<int>(g.client_count());
  const int ns = static_cast<int>(g.server_count);
  const int source = 0;
  const int sink = 1 + nc + ns;
  LoadNetwork ln{FlowNetwork(sink + 1, source, sink), {}};
  const Capacity unbounded = per_client * std::max<Capacity>(nc, 1);
  for (int c = 0; c < nc; ++c) ln.net.add_arc(source, 1 + c, per_client);
  for (int c = 0; c < nc; ++c) {
    ln.client_arc.push_back(static_cast<int>(ln.net.arcs().size()));
    for (ServerId s : g.neighbors[static_cast<std::size_t>(c)]) ln.net.add_arc(1 + c, 1 + nc + s, unbounded);
  }
  for (int s = 0; s < ns; ++s) ln.net.add_arc(1 + nc + s, sink, per_server);
  return ln;
}

}  // namespace detail

/// True iff some server flow has every load at most `lambda`.
inline bool feasibility(const ClientGraph& g, const Rational& lambda) {
  if (lambda <= Rational(0)) throw UsageError("lambda must be positive");
  g.require_nonempty_neighborhoods();
  if (g.client_count() == 0) return true;
  const auto ln = detail::load_network(g, lambda.den(), lambda.num());
  return max_flow(ln.net).value == lambda.den() * static_cast<Capacity>(g.client_count());
}

struct MaxRatio {
  Rational lambda;
  /// Inclusion-maximal K (local client indices, ascending) with |K| = lambda * |N(K)|.
  std::vector<int> tight;
};

/// max over nonempty K of |K| / |N(K)|, with the union of all maximizers.
///
/// The maximum is located by Stern-Brocot descent over fractions p/q with
/// p <= |C| and q <= |N(C)|, using feasibility (monotone in lambda) as the
/// comparison. Runs of equal-direction steps are taken by exponential then
/// binary search so the number of flow computations stays polylogarithmic.
inline MaxRatio max_ratio(const ClientGraph& g) {
  if (g.client_count() == 0) throw UsageError("max_ratio of an empty client set");
  g.require_nonempty_neighborhoods();
  const std::int64_t max_num = static_cast<std::int64_t>(g.client_count());
  const std::int64_t max_den = static_cast<std::int64_t>(g.covered_servers().size());

  auto in_range = [&](std::int64_t p, std::int64_t q) { return p <= max_num && q <= max_den; };
  auto feasible = [&](std::int64_t p, std::int64_t q) { return feasibility(g, Rational(p, q)); };

  // left = a/b is infeasible (below lambda*), right = c/d is feasible (at or above).
  std::int64_t a = 0, b = 1, c = 1, d = 0;
  // Largest k >= 1 such that pred(k) holds, given pred(1) holds and pred is monotone.
  auto largest = [](auto pred) {
    std::int64_t lo = 1, hi = 2;
    while (pred(hi)) {
      lo = hi;
      hi *= 2;
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      (pred(mid) ? lo : hi) = mid;
    }
    return lo;
  };

  while (in_range(a + c, b + d)) {
    if (feasible(a + c, b + d)) {
      const std::int64_t k = largest([&](std::int64_t k) {
        return in_range(k * a + c, k * b + d) && feasible(k * a + c, k * b + d);
      });
      c = k * a + c;
      d = k * b + d;
    } else {
      const std::int64_t k = largest([&](std::int64_t k) {
        return in_range(a + k * c, b + k * d) && !feasible(a + k * c, b + k * d);
      });
      a = a + k * c;
      b = b + k * d;
    }
  }
  if (d == 0) throw InvariantViolation("max_ratio: no feasible candidate");
  MaxRatio out{Rational(c, d), {}};

  // Just below lambda*, every non-tight K has |K| - lambda'|N(K)| < 0 while
  // the maximal tight set uniquely maximizes it, so it is the client side of
  // any minimum cut.
  const Rational below = out.lambda - Rational(1, 2 * max_den * max_den * max_num);
  const auto ln = detail::load_network(g, below.den(), below.num());
  const auto res = max_flow(ln.net);
  for (std::size_t i = 0; i < g.client_count(); ++i)
    if (res.max_cut_source_side[1 + i]) out.tight.push_back(static_cast<int>(i));

  std::vector<char> hit(g.server_count, 0);
  std::int64_t nk = 0;
  for (int i : out.tight)
    for (ServerId s : g.neighbors[static_cast<std::size_t>(i)])
      if (!hit[static_cast<std::size_t>(s)]++) ++nk;
  if (out.tight.empty() || Rational(static_cast<std::int64_t>(out.tight.size())) != out.lambda * Rational(nk))
    throw InvariantViolation("max_ratio: extracted set is not tight");
  return out;
}

struct EdgeFlow {
  ClientId client;
  ServerId server;
  Rational x;
};

struct Peel {
  Rational lambda;
  std::vector<ClientId> clients;
  std::vector<ServerId> servers;
};

/// The unique balanced server flow: loads, a realizing edge flow, and the
/// peel sequence that produced them. Servers outside every peel carry 0.
struct BalancedFlow {
  std::vector<Rational> alpha;
  std::vector<EdgeFlow> x;
  std::vector<Peel> peels;

  Rational max_alpha() const {
    Rational m(0);
    for (const auto& a : alpha) m = std::max(m, a);
    return m;
  }
};

/// Peels off the maximal densest client set and its neighborhood until no
/// clients remain.
inline BalancedFlow balanced_flow(const ClientGraph& g) {
  g.require_nonempty_neighborhoods();
  BalancedFlow out;
  out.alpha.assign(g.server_count, Rational(0));

  std::vector<char> client_left(g.client_count(), 1);
  std::vector<char> server_left(g.server_count, 1);
  std::size_t remaining = g.client_count();

  while (remaining > 0) {
    // Residual graph over remaining clients and servers, servers renumbered.
    std::vector<int> local_of(g.server_count, -1);
    std::vector<ServerId> global_of;
    for (std::size_t s = 0; s < g.server_count; ++s)
      if (server_left[s]) {
        local_of[s] = static_cast<int>(global_of.size());
        global_of.push_back(static_cast<ServerId>(s));
      }
    ClientGraph sub;
    sub.server_count = global_of.size();
    std::vector<std::size_t> client_index;
    for (std::size_t i = 0; i < g.client_count(); ++i) {
      if (!client_left[i]) continue;
      std::vector<ServerId> nb;
      for (ServerId s : g.neighbors[i])
        if (server_left[static_cast<std::size_t>(s)]) nb.push_back(local_of[static_cast<std::size_t>(s)]);
      if (nb.empty()) throw InvariantViolation("peeling left a client without neighbors");
      sub.neighbors.push_back(std::move(nb));
      sub.ids.push_back(g.ids.empty() ? static_cast<ClientId>(i) : g.ids[i]);
      client_index.push_back(i);
    }

    const MaxRatio mr = max_ratio(sub);

    // The peel as its own graph, for the realizing flow.
    ClientGraph peel_graph;
    std::vector<int> peel_local(sub.server_count, -1);
    std::vector<ServerId> peel_servers;
    for (int i : mr.tight)
      for (ServerId s : sub.neighbors[static_cast<std::size_t>(i)])
        if (peel_local[static_cast<std::size_t>(s)] < 0) {
          peel_local[static_cast<std::size_t>(s)] = 0;
          peel_servers.push_back(s);
        }
    std::sort(peel_servers.begin(), peel_servers.end());
    for (std::size_t j = 0; j < peel_servers.size(); ++j) peel_local[static_cast<std::size_t>(peel_servers[j])] = static_cast<int>(j);
    peel_graph.server_count = peel_servers.size();
    for (int i : mr.tight) {
      std::vector<ServerId> nb;
      for (ServerId s : sub.neighbors[static_cast<std::size_t>(i)]) nb.push_back(peel_local[static_cast<std::size_t>(s)]);
      peel_graph.neighbors.push_back(std::move(nb));
    }
    const auto ln = detail::load_network(peel_graph, mr.lambda.den(), mr.lambda.num());
    const auto flow = max_flow(ln.net);
    if (flow.value != mr.lambda.den() * static_cast<Capacity>(mr.tight.size()))
      throw InvariantViolation("peel is not realizable at its own ratio");

    Peel peel{mr.lambda, {}, {}};
    for (std::size_t k = 0; k < mr.tight.size(); ++k) {
      const std::size_t orig = client_index[static_cast<std::size_t>(mr.tight[k])];
      const ClientId id = g.ids.empty() ? static_cast<ClientId>(orig) : g.ids[orig];
      peel.clients.push_back(id);
      const auto& nb = peel_graph.neighbors[k];
      for (std::size_t e = 0; e < nb.size(); ++e) {
        const Capacity f = flow.arc_flow[static_cast<std::size_t>(ln.client_arc[k]) + e];
        if (f == 0) continue;
        const ServerId server = global_of[static_cast<std::size_t>(peel_servers[static_cast<std::size_t>(nb[e])])];
        out.x.push_back({id, server, Rational(f, mr.lambda.den())});
      }
      client_left[orig] = 0;
      --remaining;
    }
    for (ServerId s : peel_servers) {
      const ServerId server = global_of[static_cast<std::size_t>(s)];
      out.alpha[static_cast<std::size_t>(server)] = mr.lambda;
      server_left[static_cast<std::size_t>(server)] = 0;
      peel.servers.push_back(server);
    }
    out.peels.push_back(std::move(peel));
  }
  return out;
}

/// Balanced-flow loads of the first `prefix` arrivals, ignoring clients
/// without neighbors.
inline std::vector<Rational> alpha(const ArrivalInstance& instance, std::size_t prefix) {
  return balanced_flow(ClientGraph::from_prefix(instance, prefix)).alpha;
}

/// Clients among the first `prefix` arrivals whose arrival increased the
/// maximum matching size, in arrival order.
inline std::vector<ClientId> matchable_clients(const ArrivalInstance& instance, std::size_t prefix) {
  if (prefix > instance.client_count()) throw UsageError("prefix longer than instance");
  // Incremental Kuhn matching: an arrival raises the maximum matching size
  // iff an augmenting path from it exists in the current maximum matching.
  std::vector<ClientId> owner(instance.server_count(), -1);
  std::vector<ClientId> out;
  std::vector<int> stamp(instance.server_count(), -1);
  for (std::size_t i = 0; i < prefix; ++i) {
    const auto root = static_cast<ClientId>(i);
    // Iterative DFS over (client, next neighbor position).
    std::vector<std::pair<ClientId, std::size_t>> stack{{root, 0}};
    std::vector<ServerId> via;  // server taken from each stack frame
    bool found = false;
    while (!stack.empty() && !found) {
      auto& [c, pos] = stack.back();
      const auto nb = instance.neighbors(c);
      if (pos == nb.size()) {
        stack.pop_back();
        if (!via.empty()) via.pop_back();
        continue;
      }
      const ServerId s = nb[pos++];
      if (stamp[static_cast<std::size_t>(s)] == static_cast<int>(i)) continue;
      stamp[static_cast<std::size_t>(s)] = static_cast<int>(i);
      via.push_back(s);
      if (owner[static_cast<std::size_t>(s)] < 0) {
        found = true;
      } else {
        stack.emplace_back(owner[static_cast<std::size_t>(s)], 0);
      }
    }
    if (!found) continue;
    // stack[k] took via[k]; flip along the stack.
    for (std::size_t k = 0; k < via.size(); ++k) owner[static_cast<std::size_t>(via[k])] = stack[k].first;
    out.push_back(root);
  }
  return out;
}

/// Balanced-flow loads of the graph restricted to the matchable clients.
inline std::vector<Rational> alpha_m(const ArrivalInstance& instance, std::size_t prefix) {
  const auto cm = matchable_clients(instance, prefix);
  return balanced_flow(ClientGraph::from_clients(instance, cm)).alpha;
}

/// Checks the defining properties of a balanced flow; returns a description
/// of the first violation, or nothing.
inline std::optional<std::string> check_balanced_flow(const ClientGraph& g, const BalancedFlow& bf) {
  if (bf.alpha.size() != g.server_count) return "alpha size mismatch";
  std::vector<Rational> in(g.server_count, Rational(0));
  std::vector<Rational> out(g.client_count(), Rational(0));
  std::vector<std::size_t> local;  // original id -> local index
  auto local_of = [&](ClientId id) -> std::optional<std::size_t> {
    if (g.ids.empty()) return static_cast<std::size_t>(id);
    const auto it = std::find(g.ids.begin(), g.ids.end(), id);
    if (it == g.ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - g.ids.begin());
  };
  for (const auto& e : bf.x) {
    const auto i = local_of(e.client);
    if (!i) return "flow on unknown client " + std::to_string(e.client);
    const auto& nb = g.neighbors[*i];
    if (!std::binary_search(nb.begin(), nb.end(), e.server)) return "flow on a non-edge";
    if (e.x <= Rational(0)) return "non-positive edge flow recorded";
    Rational least = bf.alpha[static_cast<std::size_t>(nb.front())];
    for (ServerId s : nb) least = std::min(least, bf.alpha[static_cast<std::size_t>(s)]);
    if (bf.alpha[static_cast<std::size_t>(e.server)] != least)
      return "client " + std::to_string(e.client) + " sends flow to a non-minimal neighbor";
    in[static_cast<std::size_t>(e.server)] += e.x;
    out[*i] += e.x;
  }
  for (std::size_t i = 0; i < g.client_count(); ++i)
    if (out[i] != Rational(1)) return "client " + std::to_string(i) + " emits " + out[i].str();
  Rational total(0);
  for (std::size_t s = 0; s < g.server_count; ++s) {
    if (in[s] != bf.alpha[s]) return "server " + std::to_string(s) + " inflow differs from alpha";
    total += bf.alpha[s];
  }
  if (total != Rational(static_cast<std::int64_t>(g.client_count()))) return "alpha does not sum to client count";
  for (std::size_t i = 1; i < bf.peels.size(); ++i)
    if (!(bf.peels[i].lambda < bf.peels[i - 1].lambda)) return "peel ratios not strictly decreasing";
  for (const auto& p : bf.peels)
    for (ServerId s : p.servers)
      if (bf.alpha[static_cast<std::size_t>(s)] != p.lambda) return "peel server alpha differs from peel ratio";
  return std::nullopt;
}

}  // namespace sap
