#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sap/errors.hpp"
#include "sap/instance.hpp"
#include "sap/matching.hpp"
#include "sap/max_flow.hpp"
#include "sap/rational.hpp"
#include "sap/server_flow.hpp"

namespace sap {

/// Contiguous copy ranges per original server.
class CopyMap {
 public:
  CopyMap() = default;
  explicit CopyMap(std::span<const std::int32_t> counts) : first_(counts.size() + 1, 0) {
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (counts[s] < 0) throw UsageError("negative copy count");
      first_[s + 1] = first_[s] + counts[s];
      for (std::int32_t k = 0; k < counts[s]; ++k) original_.push_back(static_cast<ServerId>(s));
    }
  }

  std::size_t server_count() const { return first_.empty() ? 0 : first_.size() - 1; }
  std::size_t copy_count() const { return original_.size(); }
  std::int32_t first_copy(ServerId s) const { return first_.at(static_cast<std::size_t>(s)); }
  std::int32_t copies(ServerId s) const {
    return first_.at(static_cast<std::size_t>(s) + 1) - first_.at(static_cast<std::size_t>(s));
  }
  ServerId original(std::int32_t copy) const { return original_.at(static_cast<std::size_t>(copy)); }

  /// Copy-graph neighbor list: every copy of every neighbor, server order
  /// then copy index.
  std::vector<ServerId> expand(std::span<const ServerId> neighbors) const {
    std::vector<ServerId> out;
    for (ServerId s : neighbors)
      for (std::int32_t k = 0; k < copies(s); ++k) out.push_back(first_copy(s) + k);
    return out;
  }

  /// Ranges are disjoint, contiguous and cover every copy.
  bool consistent() const {
    for (std::size_t s = 0; s < server_count(); ++s)
      for (std::int32_t k = first_[s]; k < first_[s + 1]; ++k)
        if (original_[static_cast<std::size_t>(k)] != static_cast<ServerId>(s)) return false;
    return first_.empty() || static_cast<std::size_t>(first_.back()) == original_.size();
  }

  friend bool operator==(const CopyMap&, const CopyMap&) = default;

 private:
  std::vector<std::int32_t> first_;
  std::vector<ServerId> original_;
};

/// True iff the clients of `g` can be assigned with every server load <= b.
inline bool load_feasible(const ClientGraph& g, std::int64_t b) {
  if (g.client_count() == 0) return true;
  if (b <= 0) return false;
  return max_flow(detail::load_network(g, 1, b).net).value == static_cast<Capacity>(g.client_count());
}

/// Minimum possible maximum load over the first `prefix` arrivals. Clients
/// without neighbors are ignored; 0 when no client can be served. `hint` is
/// a lower bound tried first together with hint + 1.
inline std::int32_t opt_load(const ArrivalInstance& instance, std::size_t prefix, std::int32_t hint = 0) {
  const auto g = ClientGraph::from_prefix(instance, prefix);
  if (g.client_count() == 0) return 0;
  std::int64_t lo = std::max<std::int64_t>(hint, 1);
  if (load_feasible(g, lo)) {
    if (lo == 1 || !load_feasible(g, lo - 1)) return static_cast<std::int32_t>(lo);
    lo = 1;
  } else if (load_feasible(g, lo + 1)) {
    return static_cast<std::int32_t>(lo + 1);
  } else {
    lo += 2;
  }
  std::int64_t hi = static_cast<std::int64_t>(g.client_count());
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (load_feasible(g, mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return static_cast<std::int32_t>(lo);
}

struct CapacitatedResult {
  MatchState state;  // original servers with their capacities
  RunLog log;
  CopyMap copies;
  MatchState copy_state;
};

/// SAP on the server-copy graph; results mapped back to original servers.
inline CapacitatedResult run_capacitated(const ArrivalInstance& instance,
                                         std::optional<std::vector<std::int32_t>> capacities = std::nullopt) {
  std::vector<std::int32_t> caps;
  if (capacities) {
    caps = std::move(*capacities);
  } else {
    for (std::size_t s = 0; s < instance.server_count(); ++s) caps.push_back(instance.capacity(static_cast<ServerId>(s)));
  }
  if (caps.size() != instance.server_count()) throw UsageError("capacities must cover every server");
  for (std::size_t s = 0; s < caps.size(); ++s)
    if (caps[s] < 1) throw UsageError("server " + std::to_string(s) + ": capacity must be >= 1");

  CopyMap map(caps);
  std::vector<std::vector<ServerId>> arrivals;
  for (const auto& nb : instance.arrivals()) arrivals.push_back(map.expand(nb));
  const ArrivalInstance copy_instance(map.copy_count(), std::move(arrivals));
  auto sap = run_sap(copy_instance);

  CapacitatedResult out{MatchState(instance.server_count(), caps), std::move(sap.log), std::move(map), std::move(sap.state)};
  for (std::size_t c = 0; c < out.copy_state.arrived_count(); ++c) {
    out.state.register_arrival();
    if (const auto k = out.copy_state.server_of(static_cast<ClientId>(c)))
      out.state.assign(static_cast<ClientId>(c), out.copies.original(*k));
  }
  if (!out.state.consistent()) throw InvariantViolation("capacitated mapping broke the capacity bound");
  return out;
}

struct Epoch {
  std::size_t first_arrival = 0;  // arrival index that opened the epoch
  std::int32_t opt = 0;
};

struct MinmaxResult {
  MatchState state;
  RunLog log;
  std::vector<Epoch> epochs;
  std::vector<std::int32_t> opt_history;       // opt after each arrival
  std::vector<std::int32_t> max_load_history;  // max load after each arrival
  std::vector<ClientId> unservable;
};

/// Maintains an assignment of minimum possible maximum load. Every server
/// holds opt copies; when opt rises every server gains a copy and the new
/// client takes its smallest neighbor, otherwise it augments along a
/// shortest path to a server below opt.
inline MinmaxResult run_minmax(const ArrivalInstance& instance) {
  if (!instance.unit_capacities()) throw UsageError("min-max mode takes no capacities");
  MinmaxResult out{MatchState(instance.server_count(), std::vector<std::int32_t>(instance.server_count(), 0)), {}, {}, {}, {}, {}};
  std::int32_t opt = 0;
  for (std::size_t i = 0; i < instance.client_count(); ++i) {
    const auto c = static_cast<ClientId>(i);
    arrive(out.state, instance, c);
    const auto nb = instance.neighbors(c);
    std::optional<std::int64_t> edges;
    if (nb.empty()) {
      out.unservable.push_back(c);
    } else {
      const std::int32_t next = opt_load(instance, i + 1, opt);
      if (next < opt) throw InvariantViolation("opt decreased");
      if (next > opt) {
        opt = next;
        for (std::size_t s = 0; s < instance.server_count(); ++s) out.state.set_capacity(static_cast<ServerId>(s), opt);
        out.epochs.push_back({i, opt});
        if (!out.state.has_room(nb.front())) throw InvariantViolation("new epoch but smallest neighbor is full");
        out.state.assign(c, nb.front());
        edges = 1;
      } else {
        const auto path = shortest_aug_path(out.state, instance, c);
        if (!path) throw InvariantViolation("no augmenting path although opt did not change");
        augment(out.state, instance, *path);
        edges = path->edge_count();
      }
    }
    out.log.record(c, edges);
    out.opt_history.push_back(opt);
    out.max_load_history.push_back(out.state.max_load());
    if (out.state.max_load() != opt)
      throw InvariantViolation("max load " + std::to_string(out.state.max_load()) + " differs from opt " +
                               std::to_string(opt) + " after arrival " + std::to_string(i));
  }
  return out;
}

struct SemiMatchingResult {
  MatchState state;
  RunLog log;
  CopyMap copies;
  std::vector<std::vector<std::int32_t>> allowance_history;  // after each arrival
  std::vector<std::vector<std::int32_t>> load_history;
  std::vector<Rational> alpha;  // final balanced-flow loads
};

/// ceil((1 + eps) * a) per server.
inline std::vector<std::int32_t> allowances(const std::vector<Rational>& alpha, const Rational& eps) {
  std::vector<std::int32_t> out;
  for (const auto& a : alpha) out.push_back(static_cast<std::int32_t>(((Rational(1) + eps) * a).ceil()));
  return out;
}

/// Approximate semi-matching: each server s holds at most
/// ceil((1 + eps) * alpha(s)) clients, alpha recomputed after every arrival.
inline SemiMatchingResult run_semi_matching(const ArrivalInstance& instance, const Rational& eps) {
  if (eps <= Rational(0)) throw UsageError("epsilon must be positive");
  if (!instance.unit_capacities()) throw UsageError("semi-matching mode takes no capacities");
  for (std::size_t c = 0; c < instance.client_count(); ++c)
    if (instance.neighbors(static_cast<ClientId>(c)).empty())
      throw UsageError("client " + std::to_string(c) + " has no neighbors");

  const std::size_t S = instance.server_count();
  SemiMatchingResult out{MatchState(S, std::vector<std::int32_t>(S, 0)), {}, {}, {}, {}, std::vector<Rational>(S, Rational(0))};
  std::vector<std::int32_t> allow(S, 0);
  for (std::size_t i = 0; i < instance.client_count(); ++i) {
    const auto c = static_cast<ClientId>(i);
    arrive(out.state, instance, c);
    out.alpha = alpha(instance, i + 1);
    const auto next = allowances(out.alpha, eps);
    for (std::size_t s = 0; s < S; ++s) {
      if (next[s] < allow[s]) throw InvariantViolation("allowance of server " + std::to_string(s) + " decreased");
      out.state.set_capacity(static_cast<ServerId>(s), next[s]);
    }
    allow = next;
    out.copies = CopyMap(allow);

    const auto path = shortest_aug_path(out.state, instance, c);
    if (!path) throw InvariantViolation("client " + std::to_string(c) + " found no server within allowance");
    augment(out.state, instance, *path);
    out.log.record(c, path->edge_count());

    std::vector<std::int32_t> loads;
    for (std::size_t s = 0; s < S; ++s) {
      loads.push_back(out.state.load(static_cast<ServerId>(s)));
      if (loads.back() > allow[s]) throw InvariantViolation("load exceeds allowance");
    }
    out.allowance_history.push_back(allow);
    out.load_history.push_back(std::move(loads));
  }
  return out;
}

}  // namespace sap
