#include <gtest/gtest.h>

#include <set>

#include "sap/extensions.hpp"
#include "sap/generators.hpp"
#include "sap/oracles.hpp"

using namespace sap;

namespace {

// Per-block counts (clients of block i placed on server i) over all
// assignments of the adversary prefix whose max load is <= cap.
std::vector<std::vector<std::int32_t>> block_assignments(const std::vector<std::int32_t>& sizes, std::int32_t cap) {
  const std::size_t L = sizes.size();
  std::vector<std::vector<std::int32_t>> out;
  std::vector<std::int32_t> low(L, 0);
  auto go = [&](auto&& self, std::size_t i, std::int32_t carried) -> void {
    // `carried` clients of block i-1 sit on server i
    if (i == L) {
      out.push_back(low);
      return;
    }
    const std::int32_t lo_a = i + 1 == L ? sizes[i] : 0;  // last block has one server
    for (std::int32_t a = lo_a; a <= sizes[i]; ++a) {
      if (carried + a > cap) break;
      low[i] = a;
      self(self, i + 1, sizes[i] - a);
    }
  };
  go(go, 0, 0);
  return out;
}

std::vector<std::int32_t> block_sizes(const AdversaryInstance& adv, std::size_t prefix) {
  std::vector<std::int32_t> sizes(adv.L, 0);
  for (std::size_t c = 0; c < prefix; ++c) ++sizes[static_cast<std::size_t>(adv.block_of[c])];
  return sizes;
}

}  // namespace

TEST(GenRandom, SingleEdge) {
  const auto inst = gen_random(1, 1, 1, 42);
  EXPECT_EQ(inst.server_count(), 1u);
  ASSERT_EQ(inst.client_count(), 1u);
  EXPECT_EQ(inst.neighbors(0).size(), 1u);
}

TEST(GenRandom, DeterministicUnderSeed) {
  EXPECT_EQ(gen_random(20, 40, 3, 7), gen_random(20, 40, 3, 7));
  EXPECT_NE(gen_random(20, 40, 3, 7), gen_random(20, 40, 3, 8));
}

TEST(GenRandom, ExactDegreeSortedDistinct) {
  const auto inst = gen_random(20, 40, 3, 7);
  for (std::size_t c = 0; c < 40; ++c) {
    const auto nb = inst.neighbors(static_cast<ClientId>(c));
    ASSERT_EQ(nb.size(), 3u);
    EXPECT_LT(nb[0], nb[1]);
    EXPECT_LT(nb[1], nb[2]);
  }
}

TEST(GenRandom, DegreeValidation) {
  EXPECT_THROW(gen_random(3, 5, 4, 1), UsageError);
  EXPECT_THROW(gen_random(3, 5, 0, 1), UsageError);
  EXPECT_THROW(gen_random_mixed(5, 5, 3, 2, 1), UsageError);
}

TEST(GenRandom, MixedDegreesCoverRange) {
  const auto inst = gen_random_mixed(10, 500, 1, 5, 3);
  std::set<std::size_t> seen;
  for (std::size_t c = 0; c < inst.client_count(); ++c) seen.insert(inst.neighbors(static_cast<ClientId>(c)).size());
  EXPECT_EQ(seen, (std::set<std::size_t>{1, 2, 3, 4, 5}));
}

TEST(GenComplete, Shapes) {
  const auto inst = gen_complete(10, 20);
  EXPECT_EQ(inst.client_count(), 10u);
  for (std::size_t c = 0; c < 10; ++c) EXPECT_EQ(inst.neighbors(static_cast<ClientId>(c)).size(), 20u);
  EXPECT_EQ(gen_complete(1, 1).neighbors(0).size(), 1u);
  EXPECT_THROW(gen_complete(0, 3), UsageError);
}

TEST(GenAdversary, Sizes) {
  for (std::size_t L : {4u, 8u, 12u}) {
    const auto adv = gen_minmax_adversary(L);
    EXPECT_EQ(adv.instance.client_count(), L * L);
    EXPECT_EQ(adv.instance.server_count(), L);
    EXPECT_EQ(adv.epochs.size(), L / 2);
    EXPECT_EQ(adv.initial_end, L * L / 2);
  }
  EXPECT_THROW(gen_minmax_adversary(6), UsageError);
  EXPECT_THROW(gen_minmax_adversary(0), UsageError);
}

TEST(GenAdversary, FinalOptIsL) {
  const auto adv = gen_minmax_adversary(4);
  EXPECT_EQ(opt_load(adv.instance, adv.instance.client_count()), 4);
}

TEST(GenAdversary, Neighborhoods) {
  const auto adv = gen_minmax_adversary(8);
  for (std::size_t c = 0; c < adv.instance.client_count(); ++c) {
    const auto b = static_cast<ServerId>(adv.block_of[c]);
    const auto nb = adv.instance.neighbors(static_cast<ClientId>(c));
    if (b == 7) {
      EXPECT_EQ(std::vector<ServerId>(nb.begin(), nb.end()), std::vector<ServerId>{7});
    } else {
      EXPECT_EQ(std::vector<ServerId>(nb.begin(), nb.end()), (std::vector<ServerId>{b, static_cast<ServerId>(b + 1)}));
    }
  }
}

TEST(GenAdversary, EpochsAlternateAndBlocksEvenOut) {
  const std::size_t L = 8;
  const auto adv = gen_minmax_adversary(L);
  for (std::size_t e = 0; e < adv.epochs.size(); ++e) {
    const auto& ep = adv.epochs[e];
    EXPECT_EQ(ep.down_heavy, e % 2 == 0);
    EXPECT_EQ(ep.end - ep.first, L);
    if (!ep.down_heavy) continue;
    const std::size_t k = e / 2 + 1;
    const auto beta = static_cast<std::int32_t>(L / 2 + 2 * (k - 1));
    for (auto s : block_sizes(adv, ep.first)) EXPECT_EQ(s, beta);
  }
}

TEST(GenAdversary, UniqueOptimumAfterDownHeavyEpochs) {
  for (std::size_t L : {4u, 8u}) {
    const auto adv = gen_minmax_adversary(L);
    const auto mm = run_minmax(adv.instance);
    for (std::size_t e = 0; e < adv.epochs.size(); e += 2) {
      const std::size_t k = e / 2 + 1;
      const auto beta = static_cast<std::int32_t>(L / 2 + 2 * (k - 1));
      const auto end = adv.epochs[e].end;
      EXPECT_EQ(opt_load(adv.instance, end), beta + 1);

      std::vector<std::int32_t> expected;
      for (std::size_t i = 1; i <= L; ++i)
        expected.push_back(i <= L / 2 ? beta + 2 - static_cast<std::int32_t>(i)
                                      : beta + static_cast<std::int32_t>(i) - static_cast<std::int32_t>(L));
      const auto all = block_assignments(block_sizes(adv, end), beta + 1);
      ASSERT_EQ(all.size(), 1u) << "L=" << L << " epoch " << e;
      EXPECT_EQ(all[0], expected);

      // the min-max run sits on that assignment at the boundary: replay the prefix
      const auto prefix = run_minmax(adv.instance.prefix(end));
      std::vector<std::int32_t> low(L, 0);
      for (std::size_t c = 0; c < end; ++c) {
        const auto b = static_cast<std::size_t>(adv.block_of[c]);
        if (prefix.state.server_of(static_cast<ClientId>(c)) == static_cast<ServerId>(b)) ++low[b];
      }
      EXPECT_EQ(low, expected);
    }
    EXPECT_EQ(mm.opt_history.back(), static_cast<std::int32_t>(L));
  }
}

TEST(GenAdversary, Padding) {
  const auto adv = gen_minmax_adversary(4, 40);
  EXPECT_EQ(adv.instance.client_count(), 40u);
  EXPECT_EQ(adv.instance.server_count(), 4u + 24u);
  EXPECT_EQ(adv.block_of.back(), -1);
  EXPECT_THROW(gen_minmax_adversary(4, 31), UsageError);
}

TEST(GenStarChain, PathLengths) {
  for (std::size_t d : {1u, 3u, 6u}) {
    const auto sc = gen_star_chain(d);
    EXPECT_EQ(sc.instance.client_count(), d * (d + 1) / 2);
    const auto r = run_sap(sc.instance);
    std::vector<std::int64_t> lengths;
    for (ClientId c : sc.key_clients) lengths.push_back(*r.log.records()[static_cast<std::size_t>(c)].path_edges);
    for (std::size_t k = 0; k < d; ++k) EXPECT_EQ(lengths[k], static_cast<std::int64_t>(2 * k + 1));
    for (std::size_t k = 1; k < d; ++k) EXPECT_EQ(lengths[k] - lengths[k - 1], 2);
    EXPECT_EQ(r.state.matched_count(), sc.instance.client_count());
  }
  EXPECT_THROW(gen_star_chain(0), UsageError);
}

TEST(Generate, DispatchIsPure) {
  GenSpec spec;
  spec.kind = GenKind::kRandom;
  spec.servers = 5;
  spec.clients = 9;
  spec.min_degree = 1;
  spec.max_degree = 3;
  spec.seed = 12;
  EXPECT_EQ(generate(spec), generate(spec));
  spec.kind = GenKind::kAdversary;
  spec.L = 8;
  EXPECT_EQ(generate(spec).client_count(), 64u);
}
