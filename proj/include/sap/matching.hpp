#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sap/errors.hpp"
#include "sap/instance.hpp"

namespace sap {

/// Current (possibly capacitated) assignment of arrived clients to servers.
///
/// `clients_of(s)` is kept sorted ascending so that searches over it are
/// deterministic.
class MatchState {
 public:
  MatchState() = default;

  explicit MatchState(const ArrivalInstance& instance)
      : clients_of_server_(instance.server_count()), capacity_(instance.server_count(), 1) {
    for (std::size_t s = 0; s < capacity_.size(); ++s) capacity_[s] = instance.capacity(static_cast<ServerId>(s));
  }

  MatchState(std::size_t server_count, std::vector<std::int32_t> capacity)
      : clients_of_server_(server_count), capacity_(std::move(capacity)) {
    if (capacity_.size() != server_count) throw UsageError("capacity vector size mismatch");
  }

  std::size_t server_count() const { return clients_of_server_.size(); }
  std::size_t arrived_count() const { return server_of_client_.size(); }
  std::size_t matched_count() const { return matched_; }

  bool arrived(ClientId c) const { return c >= 0 && static_cast<std::size_t>(c) < server_of_client_.size(); }

  std::optional<ServerId> server_of(ClientId c) const { return server_of_client_.at(static_cast<std::size_t>(c)); }
  const std::vector<std::optional<ServerId>>& server_of_client() const { return server_of_client_; }

  std::span<const ClientId> clients_of(ServerId s) const { return clients_of_server_.at(static_cast<std::size_t>(s)); }
  std::int32_t load(ServerId s) const { return static_cast<std::int32_t>(clients_of(s).size()); }
  std::int32_t capacity(ServerId s) const { return capacity_.at(static_cast<std::size_t>(s)); }
  bool has_room(ServerId s) const { return load(s) < capacity(s); }
  const std::vector<std::int32_t>& capacities() const { return capacity_; }

  std::int32_t max_load() const {
    std::int32_t m = 0;
    for (const auto& cl : clients_of_server_) m = std::max(m, static_cast<std::int32_t>(cl.size()));
    return m;
  }

  /// Raises or lowers a server's capacity; never below its current load.
  void set_capacity(ServerId s, std::int32_t cap) {
    if (cap < load(s)) throw UsageError("capacity below current load of server " + std::to_string(s));
    capacity_.at(static_cast<std::size_t>(s)) = cap;
  }

  void register_arrival() { server_of_client_.emplace_back(std::nullopt); }

  /// Points `c` at `s`, detaching it from its previous server.
  void assign(ClientId c, ServerId s) {
    auto& slot = server_of_client_.at(static_cast<std::size_t>(c));
    if (slot) {
      auto& old = clients_of_server_[static_cast<std::size_t>(*slot)];
      old.erase(std::lower_bound(old.begin(), old.end(), c));
    } else {
      ++matched_;
    }
    slot = s;
    auto& cl = clients_of_server_.at(static_cast<std::size_t>(s));
    cl.insert(std::lower_bound(cl.begin(), cl.end(), c), c);
  }

  /// Mutual consistency and capacity bounds.
  bool consistent() const {
    std::size_t matched = 0;
    for (std::size_t c = 0; c < server_of_client_.size(); ++c) {
      if (!server_of_client_[c]) continue;
      ++matched;
      const auto& cl = clients_of_server_[static_cast<std::size_t>(*server_of_client_[c])];
      if (!std::binary_search(cl.begin(), cl.end(), static_cast<ClientId>(c))) return false;
    }
    std::size_t listed = 0;
    for (std::size_t s = 0; s < clients_of_server_.size(); ++s) {
      const auto& cl = clients_of_server_[s];
      if (static_cast<std::int32_t>(cl.size()) > capacity_[s]) return false;
      if (!std::is_sorted(cl.begin(), cl.end())) return false;
      for (ClientId c : cl)
        if (!arrived(c) || server_of_client_[static_cast<std::size_t>(c)] != static_cast<ServerId>(s)) return false;
      listed += cl.size();
    }
    return matched == listed && matched == matched_;
  }

  friend bool operator==(const MatchState&, const MatchState&) = default;

 private:
  std::vector<std::optional<ServerId>> server_of_client_;
  std::vector<std::vector<ClientId>> clients_of_server_;
  std::vector<std::int32_t> capacity_;
  std::size_t matched_ = 0;
};

/// Alternating path c0 -> s0 => c1 -> s1 => ... -> sk.
///
/// `clients[i] -> servers[i]` are unmatched edges; `servers[i] => clients[i+1]`
/// are matched edges. The path starts at an unmatched client and ends at a
/// server with residual capacity.
struct AugPath {
  std::vector<ClientId> clients;
  std::vector<ServerId> servers;

  std::int64_t edge_count() const { return 2 * static_cast<std::int64_t>(servers.size()) - 1; }
  std::int64_t replacements() const { return static_cast<std::int64_t>(clients.size()) - 1; }

  friend bool operator==(const AugPath&, const AugPath&) = default;
};

struct ArrivalRecord {
  ClientId client = 0;
  bool matched = false;
  std::optional<std::int64_t> path_edges;
  std::int64_t replacements = 0;

  friend bool operator==(const ArrivalRecord&, const ArrivalRecord&) = default;
};

/// Per-arrival telemetry with running totals.
class RunLog {
 public:
  void record(ClientId client, std::optional<std::int64_t> path_edges) {
    ArrivalRecord r;
    r.client = client;
    r.matched = path_edges.has_value();
    r.path_edges = path_edges;
    if (path_edges) {
      if (*path_edges < 1 || *path_edges % 2 == 0) throw InvariantViolation("path edge count must be odd");
      r.replacements = (*path_edges - 1) / 2;
      cum_replacements_ += r.replacements;
      cum_path_edges_ += *path_edges;
      ++cum_matched_;
      const auto len = static_cast<std::size_t>(*path_edges);
      if (histogram_.size() <= len) histogram_.resize(len + 1, 0);
      ++histogram_[len];
      for (std::size_t i = 0; (std::int64_t{1} << i) < *path_edges; ++i) {
        if (longer_than_pow2_.size() <= i) longer_than_pow2_.resize(i + 1, 0);
        ++longer_than_pow2_[i];
      }
    }
    records_.push_back(r);
  }

  const std::vector<ArrivalRecord>& records() const { return records_; }
  std::int64_t cum_replacements() const { return cum_replacements_; }
  std::int64_t cum_path_edges() const { return cum_path_edges_; }
  std::int64_t cum_matched() const { return cum_matched_; }

  /// Number of augmenting paths with more than `h` edges.
  std::int64_t paths_longer_than(std::int64_t h) const {
    std::int64_t n = 0;
    for (std::size_t len = 0; len < histogram_.size(); ++len)
      if (static_cast<std::int64_t>(len) > h) n += histogram_[len];
    return n;
  }

  /// Entry i counts paths with more than 2^i edges.
  const std::vector<std::int64_t>& longer_than_pow2() const { return longer_than_pow2_; }

  std::int64_t max_path_edges() const { return histogram_.empty() ? 0 : static_cast<std::int64_t>(histogram_.size()) - 1; }

  /// Cumulative fields equal the per-record sums.
  bool consistent() const {
    std::int64_t rep = 0, edges = 0, matched = 0;
    for (const auto& r : records_) {
      if (r.matched != r.path_edges.has_value()) return false;
      if (r.path_edges) {
        if (r.replacements * 2 + 1 != *r.path_edges) return false;
        edges += *r.path_edges;
        ++matched;
      } else if (r.replacements != 0) {
        return false;
      }
      rep += r.replacements;
    }
    return rep == cum_replacements_ && edges == cum_path_edges_ && matched == cum_matched_;
  }

  friend bool operator==(const RunLog&, const RunLog&) = default;

 private:
  std::vector<ArrivalRecord> records_;
  std::int64_t cum_replacements_ = 0;
  std::int64_t cum_path_edges_ = 0;
  std::int64_t cum_matched_ = 0;
  std::vector<std::int64_t> histogram_;
  std::vector<std::int64_t> longer_than_pow2_;
};

/// Registers the next client as arrived and unmatched.
inline void arrive(MatchState& state, const ArrivalInstance& instance, ClientId client) {
  if (client < 0 || static_cast<std::size_t>(client) != state.arrived_count())
    throw UsageError("client " + std::to_string(client) + " is not the next arrival (expected " +
                     std::to_string(state.arrived_count()) + ")");
  if (static_cast<std::size_t>(client) >= instance.client_count())
    throw UsageError("client " + std::to_string(client) + " not in instance");
  state.register_arrival();
}

namespace detail {

// Layered BFS over alternating paths starting at `root_clients` (already
// marked). Each layer is scanned in ascending index order so the first
// discoverer of a vertex is its smallest-index parent. Returns the terminal
// server with room, if any.
inline std::optional<ServerId> layered_search(const MatchState& state, const ArrivalInstance& instance,
                                              std::vector<ClientId> layer, std::vector<char>& seen_client,
                                              std::vector<char>& seen_server, std::vector<ClientId>& server_parent,
                                              std::vector<ServerId>& client_parent) {
  while (!layer.empty()) {
    std::vector<ServerId> servers;
    for (ClientId c : layer) {
      const auto own = state.server_of(c);
      for (ServerId s : instance.neighbors(c)) {
        if (seen_server[static_cast<std::size_t>(s)] || (own && *own == s)) continue;
        seen_server[static_cast<std::size_t>(s)] = 1;
        server_parent[static_cast<std::size_t>(s)] = c;
        servers.push_back(s);
      }
    }
    std::sort(servers.begin(), servers.end());
    for (ServerId s : servers)
      if (state.has_room(s)) return s;
    std::vector<ClientId> next;
    for (ServerId s : servers) {
      for (ClientId c : state.clients_of(s)) {
        if (seen_client[static_cast<std::size_t>(c)]) continue;
        seen_client[static_cast<std::size_t>(c)] = 1;
        client_parent[static_cast<std::size_t>(c)] = s;
        next.push_back(c);
      }
    }
    std::sort(next.begin(), next.end());
    layer = std::move(next);
  }
  return std::nullopt;
}

}  // namespace detail

/// Minimum-edge augmenting path from the unmatched arrived client `client`.
///
/// Ties: smallest-index free server among those at minimum depth, and
/// smallest-index parent on the way back.
inline std::optional<AugPath> shortest_aug_path(const MatchState& state, const ArrivalInstance& instance,
                                                ClientId client) {
  if (!state.arrived(client)) throw UsageError("client " + std::to_string(client) + " has not arrived");
  if (state.server_of(client)) throw UsageError("client " + std::to_string(client) + " is already matched");

  std::vector<char> seen_client(state.arrived_count(), 0);
  std::vector<char> seen_server(state.server_count(), 0);
  std::vector<ClientId> server_parent(state.server_count(), -1);
  std::vector<ServerId> client_parent(state.arrived_count(), -1);
  seen_client[static_cast<std::size_t>(client)] = 1;

  const auto end = detail::layered_search(state, instance, {client}, seen_client, seen_server, server_parent,
                                          client_parent);
  if (!end) return std::nullopt;

  AugPath path;
  ServerId s = *end;
  while (true) {
    path.servers.push_back(s);
    const ClientId c = server_parent[static_cast<std::size_t>(s)];
    path.clients.push_back(c);
    if (c == client) break;
    s = client_parent[static_cast<std::size_t>(c)];
  }
  std::reverse(path.servers.begin(), path.servers.end());
  std::reverse(path.clients.begin(), path.clients.end());
  return path;
}

/// Edge count of the shortest augmenting tail from server `s`: an alternating
/// path that leaves `s` along a matched edge and ends at a server with room.
/// Zero when `s` itself has room.
inline std::optional<std::int64_t> shortest_tail_from_server(const MatchState& state,
                                                             const ArrivalInstance& instance, ServerId s) {
  if (state.has_room(s)) return 0;
  std::vector<char> seen_client(state.arrived_count(), 0);
  std::vector<char> seen_server(state.server_count(), 0);
  seen_server[static_cast<std::size_t>(s)] = 1;
  std::vector<ServerId> frontier{s};
  std::int64_t depth = 0;
  while (!frontier.empty()) {
    std::vector<ClientId> clients;
    for (ServerId v : frontier)
      for (ClientId c : state.clients_of(v))
        if (!seen_client[static_cast<std::size_t>(c)]) {
          seen_client[static_cast<std::size_t>(c)] = 1;
          clients.push_back(c);
        }
    std::vector<ServerId> next;
    for (ClientId c : clients)
      for (ServerId v : instance.neighbors(c)) {
        if (seen_server[static_cast<std::size_t>(v)]) continue;
        seen_server[static_cast<std::size_t>(v)] = 1;
        if (state.has_room(v)) return depth + 2;
        next.push_back(v);
      }
    depth += 2;
    frontier = std::move(next);
  }
  return std::nullopt;
}

/// Checks that `path` is a valid augmenting path against the current state.
inline void validate_path(const MatchState& state, const ArrivalInstance& instance, const AugPath& path) {
  if (path.clients.empty() || path.clients.size() != path.servers.size())
    throw UsageError("malformed augmenting path");
  const ClientId first = path.clients.front();
  if (!state.arrived(first) || state.server_of(first)) throw UsageError("path must start at an unmatched arrived client");
  std::vector<char> seen_client(state.arrived_count(), 0);
  std::vector<char> seen_server(state.server_count(), 0);
  for (std::size_t i = 0; i < path.clients.size(); ++i) {
    const ClientId c = path.clients[i];
    const ServerId s = path.servers[i];
    if (!state.arrived(c) || s < 0 || static_cast<std::size_t>(s) >= state.server_count())
      throw UsageError("stale path: vertex out of range");
    if (seen_client[static_cast<std::size_t>(c)]++ || seen_server[static_cast<std::size_t>(s)]++)
      throw UsageError("stale path: repeated vertex");
    if (!instance.adjacent(c, s)) throw UsageError("stale path: non-edge");
    if (state.server_of(c) == s) throw UsageError("stale path: expected unmatched edge");
    if (i + 1 < path.clients.size() && state.server_of(path.clients[i + 1]) != s)
      throw UsageError("stale path: expected matched edge");
  }
  if (!state.has_room(path.servers.back())) throw UsageError("stale path: terminal server is full");
}

/// Flips the path; returns how many already-matched clients changed server.
inline std::int64_t augment(MatchState& state, const ArrivalInstance& instance, const AugPath& path) {
  validate_path(state, instance, path);
  for (std::size_t i = path.clients.size(); i-- > 0;) state.assign(path.clients[i], path.servers[i]);
  return path.replacements();
}

struct SapResult {
  MatchState state;
  RunLog log;
};

/// Shortest-augmenting-path protocol over all arrivals, unit capacities.
inline SapResult run_sap(const ArrivalInstance& instance) {
  if (!instance.unit_capacities()) throw UsageError("run_sap requires unit capacities; use run_capacitated");
  SapResult out{MatchState(instance), {}};
  for (std::size_t i = 0; i < instance.client_count(); ++i) {
    const auto c = static_cast<ClientId>(i);
    arrive(out.state, instance, c);
    const auto path = shortest_aug_path(out.state, instance, c);
    if (path) augment(out.state, instance, *path);
    out.log.record(c, path ? std::optional<std::int64_t>(path->edge_count()) : std::nullopt);
  }
  return out;
}

}  // namespace sap
