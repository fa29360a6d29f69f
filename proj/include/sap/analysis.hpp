#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sap/extensions.hpp"
#include "sap/fast_sap.hpp"
#include "sap/instance.hpp"
#include "sap/matching.hpp"
#include "sap/oracles.hpp"
#include "sap/rational.hpp"
#include "sap/server_flow.hpp"

namespace sap {

// Real-valued bounds are compared with a small upward slack so that rounding
// in log never turns a true inequality into a reported failure.
inline bool within(long double value, long double bound) {
  return value <= bound + 1e-9L * std::max<long double>(1, std::fabs(bound));
}

inline long double ln(std::size_t n) { return std::log(static_cast<long double>(n)); }

/// Cap on the number of augmenting paths longer than h edges.
inline long double long_path_bound(std::size_t n, std::int64_t h) {
  return 4 * static_cast<long double>(n) * ln(n) / static_cast<long double>(h);
}

/// Cap on total augmenting-path edges over a run.
inline long double total_edges_bound(std::size_t n) {
  const auto levels = static_cast<long double>(n >= 1 ? std::bit_width(n) - 1 : 0) + 2;
  return 8 * static_cast<long double>(n) * ln(n) * levels;
}

/// (2 / eps) ln |C_M| for a server with alpha_M = 1 - eps.
inline long double expansion_bound(const Rational& eps, std::size_t cm) {
  return 2 * ln(cm) / eps.to_long_double();
}

/// 2 floor(ln |C_M| / eps) + 2: every level of the active tail except the
/// last one costs a factor (1 + eps) in client count.
inline std::int64_t expansion_bound_whole_levels(const Rational& eps, std::size_t cm) {
  const long double levels = ln(cm) / eps.to_long_double();
  return 2 * static_cast<std::int64_t>(std::floor(levels + 1e-9L)) + 2;
}

/// 2 ((1 + eps) / eps) ln n.
inline long double semi_tail_bound(const Rational& eps, std::size_t n) {
  const long double e = eps.to_long_double();
  return 2 * (1 + e) / e * ln(n);
}

/// 32 n min(L ln^2 n, sqrt(n) ln n).
inline long double minmax_bound(std::size_t n, std::int64_t L) {
  const long double l = ln(n);
  const long double nn = static_cast<long double>(n);
  return 32 * nn * std::min(static_cast<long double>(L) * l * l, std::sqrt(nn) * l);
}

struct PropertyResult {
  PropertyResult(std::string n = {}) : name(std::move(n)) {}  // NOLINT(google-explicit-constructor)

  std::string name;
  bool passed = true;
  bool skipped = false;
  bool informational = false;  // reported but never fails the run
  std::int64_t checks = 0;
  std::string detail;

  void fail(std::string why) {
    if (passed) detail = std::move(why);
    passed = false;
  }
};

/// Maximum-matching, long-path and total-length checks for one engine's log.
inline void check_run(const ArrivalInstance& instance, const RunLog& log, const std::vector<std::size_t>& sizes,
                      PropertyResult& maximum, PropertyResult& paths, PropertyResult& total) {
  const std::size_t n = instance.client_count();
  for (std::size_t i = 0; i < n; ++i) {
    ++maximum.checks;
    const auto want = oracle::hopcroft_karp_size(oracle::GraphSnapshot::of_prefix(instance, i + 1));
    if (sizes[i] != want)
      maximum.fail("after arrival " + std::to_string(i) + ": matching " + std::to_string(sizes[i]) + ", maximum " +
                   std::to_string(want));
  }
  for (std::int64_t h = 1; h <= 2 * static_cast<std::int64_t>(n); h *= 2) {
    ++paths.checks;
    const auto count = log.paths_longer_than(h);
    if (!within(static_cast<long double>(count), long_path_bound(n, h)))
      paths.fail("h=" + std::to_string(h) + ": " + std::to_string(count) + " paths longer than h");
  }
  if (n >= 2) {
    ++total.checks;
    if (!within(static_cast<long double>(log.cum_path_edges()), total_edges_bound(n)))
      total.fail("total path edges " + std::to_string(log.cum_path_edges()));
  }
}

/// Replays SAP and the fast engine and checks every per-arrival property.
/// Flow properties need every client to have a neighbor; they are skipped
/// with a notice otherwise. `with_flows` turns them on.
inline std::vector<PropertyResult> verify_instance(const ArrivalInstance& instance, bool with_flows) {
  const std::size_t n = instance.client_count();
  PropertyResult maximum{"maximum matching after every arrival"};
  PropertyResult paths{"long augmenting paths per h"};
  PropertyResult total{"total augmenting path edges"};
  PropertyResult fidelity{"fast engine path lengths"};
  PropertyResult stays{"matched clients stay matched"};

  if (!instance.unit_capacities()) {
    auto cap = run_capacitated(instance);
    std::vector<std::size_t> sizes;
    std::size_t m = 0;
    for (const auto& r : cap.log.records()) sizes.push_back(m += r.matched);
    PropertyResult covered{"capacitated matching is maximum"};
    for (std::size_t i = 0; i < n; ++i) {
      ++covered.checks;
      auto g = ClientGraph::from_prefix(instance, i + 1);
      FlowNetwork net(static_cast<int>(g.client_count() + instance.server_count()) + 2, 0,
                      static_cast<int>(g.client_count() + instance.server_count()) + 1);
      for (std::size_t c = 0; c < g.client_count(); ++c) {
        net.add_arc(0, 1 + static_cast<int>(c), 1);
        for (ServerId s : g.neighbors[c]) net.add_arc(1 + static_cast<int>(c), 1 + static_cast<int>(g.client_count()) + s, 1);
      }
      for (std::size_t s = 0; s < instance.server_count(); ++s)
        net.add_arc(1 + static_cast<int>(g.client_count() + s), net.sink(), instance.capacity(static_cast<ServerId>(s)));
      if (static_cast<Capacity>(sizes[i]) != max_flow(net).value) covered.fail("after arrival " + std::to_string(i));
    }
    PropertyResult dummy_max{"unused"};
    check_run(instance, cap.log, sizes, dummy_max, paths, total);
    return {covered, paths, total};
  }

  // Naive engine, replayed with per-arrival bookkeeping.
  MatchState state(instance);
  RunLog log;
  std::vector<std::size_t> sizes;
  std::vector<MatchState> states;  // after each arrival
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<ClientId>(i);
    arrive(state, instance, c);
    const auto path = shortest_aug_path(state, instance, c);
    if (path) augment(state, instance, *path);
    log.record(c, path ? std::optional<std::int64_t>(path->edge_count()) : std::nullopt);
    sizes.push_back(state.matched_count());
    for (std::size_t k = 0; k < i; ++k) {
      ++stays.checks;
      const bool before = states.back().server_of(static_cast<ClientId>(k)).has_value();
      if (before != state.server_of(static_cast<ClientId>(k)).has_value())
        stays.fail("client " + std::to_string(k) + " changed matched status at arrival " + std::to_string(i));
    }
    states.push_back(state);
  }
  check_run(instance, log, sizes, maximum, paths, total);

  // Fast engine, every step compared against a fresh BFS on its own state.
  {
    FastSap engine(instance, {std::nullopt, Validation::kEvery});
    RunLog fast_log;
    std::vector<std::size_t> fast_sizes;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<ClientId>(i);
      MatchState before = engine.state();
      arrive(before, instance, c);
      const auto want = oracle::oracle_shortest_aug_path(oracle::MatchSnapshot::of(before, instance), c);
      const auto path = engine.arrival_step(c);
      ++fidelity.checks;
      const auto got = path ? std::optional<std::int64_t>(path->edge_count()) : std::nullopt;
      if (got != want) fidelity.fail("arrival " + std::to_string(i) + ": engine and BFS disagree");
      if (path) engine.apply_augment(*path);
      if (!engine.orientation_matches()) fidelity.fail("arrival " + std::to_string(i) + ": digraph out of sync");
      fast_log.record(c, got);
      fast_sizes.push_back(engine.state().matched_count());
    }
    check_run(instance, fast_log, fast_sizes, maximum, paths, total);
  }

  std::vector<PropertyResult> out{maximum, stays, paths, total, fidelity};
  if (!with_flows) return out;

  PropertyResult flows{"balanced flow invariants"};
  PropertyResult oracle_eq{"balanced flow equals peeling oracle"};
  PropertyResult mono{"alpha monotone over arrivals"};
  PropertyResult local{"alpha unchanged below the arrival's minimum"};
  PropertyResult hall{"max alpha <= 1 iff every client matchable"};
  PropertyResult expand{"augmenting tail within whole-level expansion bound"};
  PropertyResult expand_lit{"augmenting tail within (2/eps) ln|C_M|"};
  expand_lit.informational = true;

  for (std::size_t c = 0; c < n; ++c) {
    if (instance.neighbors(static_cast<ClientId>(c)).empty()) {
      for (auto* p : {&flows, &oracle_eq, &mono, &local, &hall, &expand, &expand_lit}) {
        p->skipped = true;
        p->detail = "client " + std::to_string(c) + " has no neighbors; flow checks skipped";
      }
      for (auto* p : {&flows, &oracle_eq, &mono, &local, &hall, &expand, &expand_lit}) out.push_back(*p);
      return out;
    }
  }

  std::vector<Rational> prev(instance.server_count(), Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = ClientGraph::from_prefix(instance, i + 1);
    const auto bf = balanced_flow(g);
    ++flows.checks;
    if (const auto err = check_balanced_flow(g, bf)) flows.fail("prefix " + std::to_string(i + 1) + ": " + *err);
    if (g.client_count() <= 16) {
      ++oracle_eq.checks;
      if (oracle::oracle_balanced_flow({g.server_count, g.neighbors}) != bf.alpha)
        oracle_eq.fail("prefix " + std::to_string(i + 1));
    }
    const auto nb = instance.neighbors(static_cast<ClientId>(i));
    Rational least = prev[static_cast<std::size_t>(nb.front())];
    for (ServerId s : nb) least = std::min(least, prev[static_cast<std::size_t>(s)]);
    for (std::size_t s = 0; s < instance.server_count(); ++s) {
      ++mono.checks;
      if (bf.alpha[s] < prev[s]) mono.fail("server " + std::to_string(s) + " at arrival " + std::to_string(i));
      if (prev[s] < least) {
        ++local.checks;
        if (bf.alpha[s] != prev[s]) local.fail("server " + std::to_string(s) + " at arrival " + std::to_string(i));
      }
    }
    ++hall.checks;
    const bool all = oracle::hopcroft_karp_size(oracle::GraphSnapshot::of_prefix(instance, i + 1)) == i + 1;
    if ((bf.max_alpha() <= Rational(1)) != all) hall.fail("prefix " + std::to_string(i + 1));
    prev = bf.alpha;

    const auto cm = matchable_clients(instance, i + 1);
    const auto am = balanced_flow(ClientGraph::from_clients(instance, cm)).alpha;
    for (std::size_t s = 0; s < instance.server_count(); ++s) {
      if (!(am[s] < Rational(1))) continue;
      const Rational eps = Rational(1) - am[s];
      const auto tail = shortest_tail_from_server(states[i], instance, static_cast<ServerId>(s));
      ++expand.checks;
      ++expand_lit.checks;
      if (!tail) {
        expand.fail("server " + std::to_string(s) + " has alpha_M < 1 but no augmenting tail");
        expand_lit.fail(expand.detail);
        continue;
      }
      if (*tail > expansion_bound_whole_levels(eps, cm.size()))
        expand.fail("server " + std::to_string(s) + " at arrival " + std::to_string(i) + ": tail " + std::to_string(*tail));
      if (!within(static_cast<long double>(*tail), expansion_bound(eps, cm.size())))
        expand_lit.fail("server " + std::to_string(s) + " at arrival " + std::to_string(i) + ": tail " +
                        std::to_string(*tail) + ", |C_M| " + std::to_string(cm.size()) + ", eps " + eps.str());
    }
  }
  for (auto* p : {&flows, &oracle_eq, &mono, &local, &hall, &expand, &expand_lit}) out.push_back(*p);
  return out;
}

}  // namespace sap
