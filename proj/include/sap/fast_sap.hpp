#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sap/errors.hpp"
#include "sap/es_tree.hpp"
#include "sap/instance.hpp"
#include "sap/matching.hpp"

namespace sap {

/// How often the level structure is cross-checked against a fresh BFS.
enum class Validation { kOff, kSampled, kEvery };

inline constexpr Validation kDefaultValidation =
#ifdef NDEBUG
    Validation::kSampled;
#else
    Validation::kEvery;
#endif

inline constexpr int kValidationSamplePeriod = 64;

struct FastSapOptions {
  std::optional<int> depth_limit;  // default: ceil(sqrt(n ln n))
  Validation validation = kDefaultValidation;
};

/// ceil(sqrt(n * ln n)), at least 1.
inline int default_depth_limit(std::size_t n) {
  if (n < 2) return 1;
  const double nn = static_cast<double>(n);
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(nn * std::log(nn)))));
}

struct PruneEvent {
  std::size_t arrival = 0;  // index of the arrival whose failed search pruned
  std::vector<ClientId> clients;
  std::vector<ServerId> servers;
};

struct FastSapStats {
  std::int64_t tree_paths = 0;
  std::int64_t brute_force_found = 0;
  std::int64_t brute_force_failed = 0;
  std::int64_t pruned_clients = 0;
  std::int64_t pruned_servers = 0;
  std::int64_t structural_updates = 0;
  std::int64_t validations = 0;
  std::vector<PruneEvent> prunes;
};

/// Shortest-augmenting-path engine over the residual digraph D.
///
/// Node numbering in D: clients 0..n-1, servers n..n+S-1, sink n+S. Unmatched
/// edges point client->server, matched edges server->client; unmatched
/// servers and not-yet-arrived clients have an arc to the sink.
class FastSap {
 public:
  explicit FastSap(const ArrivalInstance& instance, FastSapOptions options = {})
      : instance_(&instance),
        state_(instance),
        validation_(options.validation),
        tree_(node_count(instance), sink_of(instance), options.depth_limit.value_or(default_depth_limit(instance.client_count())),
              initial_arcs(instance)) {
    if (!instance.unit_capacities()) throw UsageError("fast engine requires unit capacities");
  }

  const MatchState& state() const { return state_; }
  const EsTree& tree() const { return tree_; }
  const FastSapStats& stats() const { return stats_; }
  int depth_limit() const { return tree_.depth_limit(); }

  int client_node(ClientId c) const { return c; }
  int server_node(ServerId s) const { return static_cast<int>(instance_->client_count()) + s; }
  int sink() const { return tree_.sink(); }
  bool is_client_node(int v) const { return v < static_cast<int>(instance_->client_count()); }

  /// Arrival of client `c`: wire its edges into D, drop its sink arc, and
  /// find a shortest augmenting path (tree lookup, else brute force with
  /// pruning on failure). Does not augment.
  std::optional<AugPath> arrival_step(ClientId c) {
    arrive(state_, *instance_, c);
    const int cn = client_node(c);
    if (!tree_.deleted(cn)) {
      for (ServerId s : instance_->neighbors(c)) {
        const int sn = server_node(s);
        if (tree_.deleted(sn)) continue;
        tree_.insert_arc(cn, sn);
        touch();
      }
      tree_.delete_arc(cn, sink());
      touch();
    }

    if (!tree_.deleted(cn) && !tree_.is_high(cn)) {
      ++stats_.tree_paths;
      return to_path(tree_.tree_path(cn));
    }
    auto found = brute_force(cn, c);
    if (found) ++stats_.brute_force_found;
    return found;
  }

  /// Flips the path in D (nearest-client arc first, each reversal as insert
  /// then delete), drops the terminal server's sink arc, and updates the
  /// matching.
  void apply_augment(const AugPath& path) {
    validate_path(state_, *instance_, path);
    std::vector<std::pair<int, int>> arcs;
    for (std::size_t i = 0; i < path.clients.size(); ++i) {
      arcs.emplace_back(client_node(path.clients[i]), server_node(path.servers[i]));
      if (i + 1 < path.clients.size()) arcs.emplace_back(server_node(path.servers[i]), client_node(path.clients[i + 1]));
    }
    const int last = server_node(path.servers.back());
    for (const auto& [u, v] : arcs)
      if (!tree_.has_arc(u, v)) throw UsageError("stale path: arc missing from residual digraph");
    if (!tree_.has_arc(last, sink())) throw UsageError("stale path: terminal server has no sink arc");

    for (const auto& [u, v] : arcs) {
      tree_.insert_arc(v, u);
      touch();
      tree_.delete_arc(u, v);
      touch();
    }
    tree_.delete_arc(last, sink());
    touch();
    augment(state_, *instance_, path);
  }

  /// D's arcs mirror the matching exactly (ignoring pruned nodes).
  bool orientation_matches() const {
    const auto& inst = *instance_;
    std::size_t expected = 0;
    for (std::size_t i = 0; i < inst.client_count(); ++i) {
      const auto c = static_cast<ClientId>(i);
      const int cn = client_node(c);
      if (tree_.deleted(cn)) continue;
      if (!state_.arrived(c)) {
        if (!tree_.has_arc(cn, sink())) return false;
        ++expected;
        continue;
      }
      if (tree_.has_arc(cn, sink())) return false;
      for (ServerId s : inst.neighbors(c)) {
        const int sn = server_node(s);
        if (tree_.deleted(sn)) continue;
        const bool matched = state_.server_of(c) == s;
        if (tree_.has_arc(sn, cn) != matched || tree_.has_arc(cn, sn) == matched) return false;
        ++expected;
      }
    }
    for (std::size_t s = 0; s < inst.server_count(); ++s) {
      const int sn = server_node(static_cast<ServerId>(s));
      if (tree_.deleted(sn)) continue;
      const bool free = state_.load(static_cast<ServerId>(s)) == 0;
      if (tree_.has_arc(sn, sink()) != free) return false;
      if (free) ++expected;
    }
    return expected == tree_.arc_count();
  }

 private:
  static int node_count(const ArrivalInstance& inst) {
    return static_cast<int>(inst.client_count() + inst.server_count()) + 1;
  }
  static int sink_of(const ArrivalInstance& inst) { return node_count(inst) - 1; }

  static std::vector<std::pair<int, int>> initial_arcs(const ArrivalInstance& inst) {
    std::vector<std::pair<int, int>> arcs;
    const int t = sink_of(inst);
    for (std::size_t c = 0; c < inst.client_count(); ++c) arcs.emplace_back(static_cast<int>(c), t);
    for (std::size_t s = 0; s < inst.server_count(); ++s)
      arcs.emplace_back(static_cast<int>(inst.client_count() + s), t);
    return arcs;
  }

  void touch() {
    ++stats_.structural_updates;
    const bool check = validation_ == Validation::kEvery ||
                       (validation_ == Validation::kSampled && stats_.structural_updates % kValidationSamplePeriod == 0);
    if (!check) return;
    ++stats_.validations;
    if (!tree_.consistent()) throw InvariantViolation("level structure disagrees with BFS");
  }

  AugPath to_path(const std::vector<int>& nodes) const {
    // nodes: c, s, c, s, ..., s, sink
    if (nodes.size() < 3 || nodes.back() != sink() || nodes.size() % 2 == 0)
      throw InvariantViolation("malformed path in residual digraph");
    AugPath p;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      if (i % 2 == 0) {
        p.clients.push_back(nodes[i]);
      } else {
        p.servers.push_back(nodes[i] - static_cast<int>(instance_->client_count()));
      }
    }
    return p;
  }

  std::optional<AugPath> brute_force(int start, ClientId c) {
    std::vector<int> prev(static_cast<std::size_t>(tree_.node_count()), -2);
    std::vector<int> touched;
    if (!tree_.deleted(start)) {
      std::deque<int> q{start};
      prev[static_cast<std::size_t>(start)] = -1;
      touched.push_back(start);
      while (!q.empty()) {
        const int v = q.front();
        q.pop_front();
        for (int w : tree_.out_arcs(v)) {
          if (tree_.deleted(w) || prev[static_cast<std::size_t>(w)] != -2) continue;
          prev[static_cast<std::size_t>(w)] = v;
          if (w == sink()) {
            std::vector<int> nodes{w};
            for (int x = v; x != -1; x = prev[static_cast<std::size_t>(x)]) nodes.push_back(x);
            std::reverse(nodes.begin(), nodes.end());
            return to_path(nodes);
          }
          touched.push_back(w);
          q.push_back(w);
        }
      }
    }
    ++stats_.brute_force_failed;
    PruneEvent ev;
    ev.arrival = static_cast<std::size_t>(c);
    for (int v : touched) {
      if (tree_.deleted(v)) continue;
      if (is_client_node(v)) {
        ev.clients.push_back(v);
      } else {
        ev.servers.push_back(v - static_cast<int>(instance_->client_count()));
      }
      tree_.delete_node(v);
      touch();
    }
    std::sort(ev.clients.begin(), ev.clients.end());
    std::sort(ev.servers.begin(), ev.servers.end());
    stats_.pruned_clients += static_cast<std::int64_t>(ev.clients.size());
    stats_.pruned_servers += static_cast<std::int64_t>(ev.servers.size());
    if (!ev.clients.empty() || !ev.servers.empty()) stats_.prunes.push_back(std::move(ev));
    return std::nullopt;
  }

  const ArrivalInstance* instance_;
  MatchState state_;
  Validation validation_;
  EsTree tree_;
  FastSapStats stats_;
};

struct FastSapResult {
  MatchState state;
  RunLog log;
  FastSapStats stats;
  int depth_limit = 0;
};

/// Full run of the fast engine.
inline FastSapResult run_fast_sap(const ArrivalInstance& instance, FastSapOptions options = {}) {
  FastSap engine(instance, options);
  RunLog log;
  for (std::size_t i = 0; i < instance.client_count(); ++i) {
    const auto c = static_cast<ClientId>(i);
    const auto path = engine.arrival_step(c);
    if (path) engine.apply_augment(*path);
    log.record(c, path ? std::optional<std::int64_t>(path->edge_count()) : std::nullopt);
  }
  return {engine.state(), std::move(log), engine.stats(), engine.depth_limit()};
}

}  // namespace sap
