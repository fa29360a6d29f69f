#include <gtest/gtest.h>

#include <deque>
#include <random>
#include <set>

#include "sap/es_tree.hpp"

using namespace sap;

namespace {

// Plain BFS to the sink over the given arc set, excluding deleted nodes.
std::vector<int> reference_levels(int n, int sink, int h, const std::set<std::pair<int, int>>& arcs,
                                  const std::vector<char>& deleted) {
  std::vector<int> dist(static_cast<std::size_t>(n), h + 1);
  dist[static_cast<std::size_t>(sink)] = 0;
  std::deque<int> q{sink};
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (const auto& [a, b] : arcs) {
      if (b != v || deleted[static_cast<std::size_t>(a)] || dist[static_cast<std::size_t>(a)] <= h) continue;
      if (dist[static_cast<std::size_t>(v)] + 1 > h) continue;
      dist[static_cast<std::size_t>(a)] = dist[static_cast<std::size_t>(v)] + 1;
      q.push_back(a);
    }
  }
  for (int v = 0; v < n; ++v)
    if (deleted[static_cast<std::size_t>(v)]) dist[static_cast<std::size_t>(v)] = h + 1;
  return dist;
}

}  // namespace

TEST(EsTree, InitialLevels) {
  // two servers (0, 1), sink 2
  const std::vector<std::pair<int, int>> arcs{{0, 2}, {1, 2}};
  EsTree t(3, 2, 3, arcs);
  EXPECT_EQ(t.level(0), 1);
  EXPECT_EQ(t.level(1), 1);
  EXPECT_EQ(t.level(2), 0);
  EXPECT_TRUE(t.consistent());
}

TEST(EsTree, DepthLimitMustBePositive) {
  EXPECT_THROW(EsTree(3, 2, 0), UsageError);
  EXPECT_THROW(EsTree(3, 3, 2), UsageError);
}

TEST(EsTree, InsertWithoutShorteningKeepsLevels) {
  const std::vector<std::pair<int, int>> arcs{{0, 2}, {1, 2}};
  EsTree t(3, 2, 3, arcs);
  t.insert_arc(0, 1);
  EXPECT_EQ(t.levels(), (std::vector<int>{1, 1, 0}));
  EXPECT_THROW(t.insert_arc(0, 1), UsageError);
}

TEST(EsTree, InsertThatShortensIsRejected) {
  // 0 -> 1 -> 2(sink), node 3 isolated (high)
  const std::vector<std::pair<int, int>> arcs{{0, 1}, {1, 2}};
  EsTree t(4, 2, 3, arcs);
  EXPECT_TRUE(t.is_high(3));
  EXPECT_THROW(t.insert_arc(3, 2), InvariantViolation);
}

TEST(EsTree, DeleteSinkArcOfIsolatedNode) {
  const std::vector<std::pair<int, int>> arcs{{0, 1}};
  EsTree t(2, 1, 4, arcs);
  t.delete_arc(0, 1);
  EXPECT_TRUE(t.is_high(0));
  EXPECT_EQ(t.level(0), t.high());
  EXPECT_THROW(t.delete_arc(0, 1), UsageError);
}

TEST(EsTree, ParallelRouteKeepsLevel) {
  // 0 -> {1, 2} -> 3(sink)
  const std::vector<std::pair<int, int>> arcs{{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  EsTree t(4, 3, 4, arcs);
  EXPECT_EQ(t.parent(0), 1);
  t.delete_arc(0, 1);
  EXPECT_EQ(t.level(0), 2);
  EXPECT_EQ(t.parent(0), 2);
  t.delete_arc(2, 3);
  EXPECT_TRUE(t.is_high(0));
  EXPECT_TRUE(t.consistent());
}

TEST(EsTree, TreePathFollowsParents) {
  const std::vector<std::pair<int, int>> arcs{{0, 1}, {1, 2}, {2, 3}};
  EsTree t(4, 3, 5, arcs);
  EXPECT_EQ(t.tree_path(0), (std::vector<int>{0, 1, 2, 3}));
  t.delete_arc(1, 2);
  EXPECT_THROW(t.tree_path(0), UsageError);
}

TEST(EsTree, DeleteNodeRaisesDependents) {
  const std::vector<std::pair<int, int>> arcs{{0, 1}, {1, 3}, {0, 2}, {2, 1}};
  EsTree t(4, 3, 5, arcs);
  t.delete_node(1);
  EXPECT_TRUE(t.deleted(1));
  EXPECT_TRUE(t.is_high(0));
  EXPECT_TRUE(t.is_high(2));
  EXPECT_EQ(t.arc_count(), 1u);  // only 0 -> 2 survives
  EXPECT_THROW(t.insert_arc(0, 1), UsageError);
  EXPECT_THROW(t.delete_node(3), UsageError);
}

TEST(EsTree, RandomUpdatesMatchBfs) {
  std::mt19937_64 rng(3);
  int updates = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);
    const int sink = n - 1;
    const int h = 1 + static_cast<int>(rng() % 5);
    std::set<std::pair<int, int>> arcs;
    for (int k = 0; k < 3 * n; ++k) {
      const int u = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
      const int v = static_cast<int>(rng() % static_cast<unsigned>(n));
      if (u != v) arcs.insert({u, v});
    }
    std::vector<std::pair<int, int>> init(arcs.begin(), arcs.end());
    EsTree t(n, sink, h, init);
    std::vector<char> deleted(static_cast<std::size_t>(n), 0);
    ASSERT_EQ(t.levels(), reference_levels(n, sink, h, arcs, deleted));
    for (int step = 0; step < 40; ++step) {
      const auto before = t.levels();
      const int kind = static_cast<int>(rng() % 10);
      if (kind < 6 && !arcs.empty()) {
        auto it = arcs.begin();
        std::advance(it, static_cast<long>(rng() % arcs.size()));
        const auto arc = *it;
        arcs.erase(it);
        t.delete_arc(arc.first, arc.second);
      } else if (kind < 9) {
        // insert only arcs that cannot shorten anything
        const int u = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        const int v = static_cast<int>(rng() % static_cast<unsigned>(n));
        if (u == v || arcs.count({u, v}) || deleted[static_cast<std::size_t>(u)] || deleted[static_cast<std::size_t>(v)])
          continue;
        if (t.level(v) + 1 < t.level(u)) {
          EXPECT_THROW(t.insert_arc(u, v), InvariantViolation);
          continue;
        }
        t.insert_arc(u, v);
        arcs.insert({u, v});
      } else {
        const int v = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        if (deleted[static_cast<std::size_t>(v)]) continue;
        t.delete_node(v);
        deleted[static_cast<std::size_t>(v)] = 1;
        for (auto it = arcs.begin(); it != arcs.end();)
          it = (it->first == v || it->second == v) ? arcs.erase(it) : std::next(it);
      }
      ++updates;
      ASSERT_EQ(t.levels(), reference_levels(n, sink, h, arcs, deleted)) << "trial " << trial << " step " << step;
      ASSERT_TRUE(t.consistent());
      for (int v = 0; v < n; ++v) ASSERT_GE(t.level(v), before[static_cast<std::size_t>(v)]);
    }
  }
  EXPECT_GT(updates, 5000);
}

TEST(EsTree, LevelsNeverDecrease) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8;
    std::vector<std::pair<int, int>> init;
    for (int u = 0; u < n - 1; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v && rng() % 3 == 0) init.emplace_back(u, v);
    EsTree t(n, n - 1, 3, init);
    auto prev = t.levels();
    std::shuffle(init.begin(), init.end(), rng);
    for (const auto& [u, v] : init) {
      t.delete_arc(u, v);
      for (int x = 0; x < n; ++x) ASSERT_GE(t.level(x), prev[static_cast<std::size_t>(x)]);
      prev = t.levels();
    }
  }
}
