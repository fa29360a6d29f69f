#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "sap/generators.hpp"
#include "sap/matching.hpp"
#include "sap/oracles.hpp"

using namespace sap;

namespace {

// Shortest augmenting path length by enumerating every simple alternating
// path from c with a DFS; exponential, small graphs only.
std::optional<std::int64_t> enumerate_alternating(const MatchState& st, const ArrivalInstance& inst, ClientId c) {
  std::optional<std::int64_t> best;
  std::vector<char> used_c(st.arrived_count(), 0), used_s(st.server_count(), 0);
  std::function<void(ClientId, std::int64_t)> go = [&](ClientId u, std::int64_t edges) {
    used_c[static_cast<std::size_t>(u)] = 1;
    for (ServerId s : inst.neighbors(u)) {
      if (used_s[static_cast<std::size_t>(s)] || st.server_of(u) == s) continue;
      const std::int64_t len = edges + 1;
      if (st.has_room(s)) {
        if (!best || len < *best) best = len;
        continue;
      }
      used_s[static_cast<std::size_t>(s)] = 1;
      for (ClientId v : st.clients_of(s))
        if (!used_c[static_cast<std::size_t>(v)]) go(v, len + 1);
      used_s[static_cast<std::size_t>(s)] = 0;
    }
    used_c[static_cast<std::size_t>(u)] = 0;
  };
  go(c, 0);
  return best;
}

ArrivalInstance random_instance(std::mt19937_64& rng, int max_side, int max_degree) {
  const int S = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_side));
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_side));
  std::vector<std::vector<ServerId>> a;
  for (int c = 0; c < n; ++c) {
    std::vector<ServerId> nb;
    const int d = static_cast<int>(rng() % static_cast<unsigned>(max_degree + 1));
    for (int k = 0; k < d; ++k) nb.push_back(static_cast<ServerId>(rng() % static_cast<unsigned>(S)));
    a.push_back(normalized_neighbors(nb));
  }
  return ArrivalInstance(static_cast<std::size_t>(S), a);
}

}  // namespace

TEST(ArrivalInstance, RejectsBadNeighborLists) {
  EXPECT_THROW(ArrivalInstance(2, {{2}}), UsageError);
  EXPECT_THROW(ArrivalInstance(2, {{1, 0}}), UsageError);
  EXPECT_THROW(ArrivalInstance(2, {{0, 0}}), UsageError);
  EXPECT_THROW(ArrivalInstance(2, {{0}}, std::vector<std::int32_t>{1}), UsageError);
  EXPECT_THROW(ArrivalInstance(2, {{0}}, std::vector<std::int32_t>{1, 0}), UsageError);
  EXPECT_NO_THROW(ArrivalInstance(2, {{}, {0, 1}}, std::vector<std::int32_t>{3, 1}));
}

TEST(ArrivalInstance, PrefixKeepsServersAndCapacities) {
  const ArrivalInstance inst(3, {{0}, {1, 2}, {2}}, std::vector<std::int32_t>{1, 2, 1});
  const auto p = inst.prefix(2);
  EXPECT_EQ(p.client_count(), 2u);
  EXPECT_EQ(p.server_count(), 3u);
  EXPECT_EQ(p.capacity(1), 2);
  EXPECT_THROW(inst.prefix(4), UsageError);
}

TEST(Arrive, EmptyStateFirstArrival) {
  const ArrivalInstance inst(1, {{0}, {0}});
  MatchState st(inst);
  arrive(st, inst, 0);
  EXPECT_EQ(st.arrived_count(), 1u);
  EXPECT_EQ(st.matched_count(), 0u);
}

TEST(Arrive, RejectsRepeatsAndGaps) {
  const ArrivalInstance inst(1, {{0}, {0}, {0}, {0}, {0}, {0}});
  MatchState st(inst);
  arrive(st, inst, 0);
  EXPECT_THROW(arrive(st, inst, 0), UsageError);
  for (ClientId c = 1; c <= 3; ++c) arrive(st, inst, c);
  EXPECT_THROW(arrive(st, inst, 5), UsageError);
  MatchState full(inst);
  for (ClientId c = 0; c < 6; ++c) arrive(full, inst, c);
  EXPECT_THROW(arrive(full, inst, 6), UsageError);
}

TEST(ShortestAugPath, DirectEdge) {
  const ArrivalInstance inst(1, {{0}});
  MatchState st(inst);
  arrive(st, inst, 0);
  const auto p = shortest_aug_path(st, inst, 0);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->edge_count(), 1);
  EXPECT_EQ(p->servers, std::vector<ServerId>{0});
}

TEST(ShortestAugPath, SaturatedComponentHasNone) {
  const ArrivalInstance inst(1, {{0}, {0}});
  MatchState st(inst);
  arrive(st, inst, 0);
  augment(st, inst, *shortest_aug_path(st, inst, 0));
  arrive(st, inst, 1);
  EXPECT_FALSE(shortest_aug_path(st, inst, 1));
}

TEST(ShortestAugPath, Preconditions) {
  const ArrivalInstance inst(1, {{0}, {0}});
  MatchState st(inst);
  EXPECT_THROW(shortest_aug_path(st, inst, 0), UsageError);
  arrive(st, inst, 0);
  augment(st, inst, *shortest_aug_path(st, inst, 0));
  EXPECT_THROW(shortest_aug_path(st, inst, 0), UsageError);
}

TEST(ShortestAugPath, TieBreakSmallestFreeServerThenSmallestParent) {
  // c0 takes s0, c1 takes s1. c2 sees s0 and s1, both full; s2 and s3 are
  // free at depth 3 via c0 ({0,3}) and c1 ({1,2}). Smallest free server wins.
  const ArrivalInstance inst(4, {{0, 3}, {1, 2}, {0, 1}});
  MatchState st(inst);
  for (ClientId c = 0; c < 2; ++c) {
    arrive(st, inst, c);
    augment(st, inst, *shortest_aug_path(st, inst, c));
  }
  arrive(st, inst, 2);
  const auto p = shortest_aug_path(st, inst, 2);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->servers, (std::vector<ServerId>{1, 2}));
  EXPECT_EQ(p->clients, (std::vector<ClientId>{2, 1}));
}

TEST(ShortestAugPath, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(11);
  int compared = 0;
  for (int t = 0; t < 400; ++t) {
    const auto inst = random_instance(rng, 8, 3);
    MatchState st(inst);
    for (std::size_t i = 0; i < inst.client_count(); ++i) {
      const auto c = static_cast<ClientId>(i);
      arrive(st, inst, c);
      const auto want = enumerate_alternating(st, inst, c);
      const auto p = shortest_aug_path(st, inst, c);
      ASSERT_EQ(p.has_value(), want.has_value());
      if (p) {
        EXPECT_EQ(p->edge_count(), *want);
        augment(st, inst, *p);
      }
      ++compared;
    }
  }
  EXPECT_GT(compared, 1000);
}

TEST(Augment, ReplacementCounts) {
  // lengths 1, 3, 5 along a chain
  const ArrivalInstance inst(3, {{0, 1}, {1, 2}, {0}});
  MatchState st(inst);
  arrive(st, inst, 0);
  auto p = *shortest_aug_path(st, inst, 0);
  EXPECT_EQ(p.edge_count(), 1);
  EXPECT_EQ(augment(st, inst, p), 0);
  arrive(st, inst, 1);
  p = *shortest_aug_path(st, inst, 1);
  EXPECT_EQ(augment(st, inst, p), 0);
  arrive(st, inst, 2);
  p = *shortest_aug_path(st, inst, 2);
  EXPECT_EQ(p.edge_count(), 5);
  const auto before = st.matched_count();
  EXPECT_EQ(augment(st, inst, p), 2);
  EXPECT_EQ(st.matched_count(), before + 1);
  EXPECT_TRUE(st.consistent());
}

TEST(Augment, ThreeEdgePathOneReplacement) {
  const ArrivalInstance inst(2, {{0, 1}, {0}});
  MatchState st(inst);
  arrive(st, inst, 0);
  augment(st, inst, *shortest_aug_path(st, inst, 0));
  arrive(st, inst, 1);
  const auto p = *shortest_aug_path(st, inst, 1);
  EXPECT_EQ(p.edge_count(), 3);
  EXPECT_EQ(augment(st, inst, p), 1);
  EXPECT_EQ(st.server_of(0), 1);
  EXPECT_EQ(st.server_of(1), 0);
}

TEST(Augment, StalePathRejected) {
  const ArrivalInstance inst(2, {{0, 1}, {0}});
  MatchState st(inst);
  arrive(st, inst, 0);
  const auto p = *shortest_aug_path(st, inst, 0);
  augment(st, inst, p);
  EXPECT_THROW(augment(st, inst, p), UsageError);
  arrive(st, inst, 1);
  AugPath bogus{{1, 0}, {0, 0}};
  EXPECT_THROW(augment(st, inst, bogus), UsageError);
  AugPath wrong_matched{{1}, {0}};  // s0 is full
  EXPECT_THROW(augment(st, inst, wrong_matched), UsageError);
}

TEST(RunSap, StarOnlyFirstMatches) {
  const ArrivalInstance inst(1, {{0}, {0}, {0}});
  const auto r = run_sap(inst);
  std::vector<std::size_t> sizes;
  std::size_t m = 0;
  for (const auto& rec : r.log.records()) sizes.push_back(m += rec.matched);
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(r.log.cum_replacements(), 0);
}

TEST(RunSap, CompleteFourByFourNoReplacements) {
  const auto r = run_sap(gen_complete(4, 4));
  EXPECT_EQ(r.state.matched_count(), 4u);
  EXPECT_EQ(r.log.cum_replacements(), 0);
  for (const auto& rec : r.log.records()) EXPECT_EQ(rec.path_edges, 1);
}

TEST(RunSap, RejectsCapacities) {
  EXPECT_THROW(run_sap(ArrivalInstance(1, {{0}}, std::vector<std::int32_t>{2})), UsageError);
}

TEST(RunSap, MaximumAfterEveryPrefixAndMatchedStayMatched) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 pick(seed);
    const std::size_t S = 1 + pick() % 100;
    const std::size_t n = 1 + pick() % 200;
    const auto inst = gen_random_mixed(S, n, 1, std::min<std::size_t>(5, S), seed);
    MatchState st(inst);
    std::vector<char> was_matched;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<ClientId>(i);
      arrive(st, inst, c);
      if (auto p = shortest_aug_path(st, inst, c)) augment(st, inst, *p);
      ASSERT_EQ(st.matched_count(), oracle::hopcroft_karp_size(oracle::GraphSnapshot::of_prefix(inst, i + 1)))
          << "seed " << seed << " arrival " << i;
      was_matched.push_back(st.server_of(c).has_value());
      for (std::size_t k = 0; k <= i; ++k)
        ASSERT_EQ(was_matched[k] != 0, st.server_of(static_cast<ClientId>(k)).has_value());
    }
    ASSERT_TRUE(st.consistent());
  }
}

TEST(RunLog, TotalsAndCounters) {
  RunLog log;
  log.record(0, 1);
  log.record(1, 5);
  log.record(2, std::nullopt);
  log.record(3, 3);
  EXPECT_EQ(log.cum_replacements(), 3);
  EXPECT_EQ(log.cum_path_edges(), 9);
  EXPECT_EQ(log.cum_matched(), 3);
  EXPECT_EQ(log.paths_longer_than(1), 2);
  EXPECT_EQ(log.paths_longer_than(4), 1);
  EXPECT_EQ(log.longer_than_pow2(), (std::vector<std::int64_t>{2, 2, 1}));
  EXPECT_EQ(log.max_path_edges(), 5);
  EXPECT_TRUE(log.consistent());
  EXPECT_THROW(log.record(4, 2), InvariantViolation);
}

TEST(ShortestTail, FromServer) {
  const ArrivalInstance inst(3, {{0, 1}, {1, 2}});
  MatchState st(inst);
  for (ClientId c = 0; c < 2; ++c) {
    arrive(st, inst, c);
    augment(st, inst, *shortest_aug_path(st, inst, c));
  }
  EXPECT_EQ(shortest_tail_from_server(st, inst, 2), 0);
  EXPECT_EQ(shortest_tail_from_server(st, inst, 1), 2);
  EXPECT_EQ(shortest_tail_from_server(st, inst, 0), 4);
  const ArrivalInstance one(1, {{0}});
  MatchState full(one);
  arrive(full, one, 0);
  augment(full, one, *shortest_aug_path(full, one, 0));
  EXPECT_FALSE(shortest_tail_from_server(full, one, 0));
}
