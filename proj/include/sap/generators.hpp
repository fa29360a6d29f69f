#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sap/errors.hpp"
#include "sap/instance.hpp"

namespace sap {

/// Each client gets a degree drawn uniformly from [min_degree, max_degree]
/// and that many distinct uniform neighbors.
inline ArrivalInstance gen_random_mixed(std::size_t servers, std::size_t clients, std::size_t min_degree,
                                        std::size_t max_degree, std::uint64_t seed) {
  if (min_degree < 1 || min_degree > max_degree) throw UsageError("need 1 <= min degree <= max degree");
  if (max_degree > servers) throw UsageError("degree exceeds server count");
  std::mt19937_64 rng(seed);
  std::vector<ServerId> pool(servers);
  std::vector<std::vector<ServerId>> arrivals;
  for (std::size_t c = 0; c < clients; ++c) {
    std::uniform_int_distribution<std::size_t> pick_degree(min_degree, max_degree);
    const std::size_t degree = pick_degree(rng);
    std::iota(pool.begin(), pool.end(), 0);
    // partial Fisher-Yates
    for (std::size_t k = 0; k < degree; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, servers - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    arrivals.push_back(normalized_neighbors({pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(degree)}));
  }
  return ArrivalInstance(servers, std::move(arrivals));
}

inline ArrivalInstance gen_random(std::size_t servers, std::size_t clients, std::size_t degree, std::uint64_t seed) {
  return gen_random_mixed(servers, clients, degree, degree, seed);
}

/// Every one of `clients` clients is adjacent to all `servers` servers.
inline ArrivalInstance gen_complete(std::size_t clients, std::size_t servers) {
  if (clients < 1 || servers < 1) throw UsageError("complete graph needs at least one client and one server");
  std::vector<ServerId> all(servers);
  std::iota(all.begin(), all.end(), 0);
  return ArrivalInstance(servers, std::vector<std::vector<ServerId>>(clients, all));
}

struct AdversaryEpoch {
  bool down_heavy = false;
  std::size_t first = 0;  // first arrival index of the epoch
  std::size_t end = 0;    // one past the last
};

struct AdversaryInstance {
  ArrivalInstance instance;
  std::size_t L = 0;
  std::vector<std::int32_t> block_of;  // 0-based block per client, -1 for padding
  std::size_t initial_end = 0;         // arrivals before the first epoch
  std::vector<AdversaryEpoch> epochs;
};

/// Block chain over L servers: block i (0-based) is adjacent to servers i
/// and i+1, the last block only to server L-1. L/2 clients per block first,
/// then L/2 epochs alternating down-heavy (lower half of the blocks) and
/// up-heavy (upper half), each adding two clients to every block of its half.
/// With `pad_to`, K_{1,1} copies are appended until there are that many clients.
inline AdversaryInstance gen_minmax_adversary(std::size_t L, std::optional<std::size_t> pad_to = std::nullopt) {
  if (L < 4 || L % 4 != 0) throw UsageError("L must be a positive multiple of 4");
  const std::size_t core = L * L;
  if (pad_to && *pad_to < 2 * core)
    throw UsageError("padding target must be at least 2*L^2 (L <= sqrt(n/2)); got " + std::to_string(*pad_to));

  AdversaryInstance out;
  out.L = L;
  std::vector<std::vector<ServerId>> arrivals;
  auto add = [&](std::size_t block) {
    if (block + 1 < L) {
      arrivals.push_back({static_cast<ServerId>(block), static_cast<ServerId>(block + 1)});
    } else {
      arrivals.push_back({static_cast<ServerId>(block)});
    }
    out.block_of.push_back(static_cast<std::int32_t>(block));
  };
  for (std::size_t b = 0; b < L; ++b)
    for (std::size_t k = 0; k < L / 2; ++k) add(b);
  out.initial_end = arrivals.size();
  for (std::size_t e = 0; e < L / 2; ++e) {
    AdversaryEpoch ep{e % 2 == 0, arrivals.size(), 0};
    const std::size_t lo = ep.down_heavy ? 0 : L / 2;
    for (std::size_t b = lo; b < lo + L / 2; ++b) {
      add(b);
      add(b);
    }
    ep.end = arrivals.size();
    out.epochs.push_back(ep);
  }

  std::size_t servers = L;
  if (pad_to) {
    while (arrivals.size() < *pad_to) {
      arrivals.push_back({static_cast<ServerId>(servers++)});
      out.block_of.push_back(-1);
    }
  }
  out.instance = ArrivalInstance(servers, std::move(arrivals));
  return out;
}

struct StarChain {
  ArrivalInstance instance;
  std::vector<ClientId> key_clients;  // in arrival order; key k needs a path of 2k-1 edges
};

/// Disjoint gadgets k = 1..depth. Gadget k has servers g_0..g_{k-1} and
/// chain clients {g_{i-1}, g_i} for i = 1..k-1, which arrive first and take
/// g_{i-1}. The key client of gadget k is adjacent to g_0 only; it arrives
/// after every chain client and its only augmenting path runs the whole
/// chain.
inline StarChain gen_star_chain(std::size_t depth) {
  if (depth < 1) throw UsageError("depth must be >= 1");
  std::vector<std::vector<ServerId>> arrivals;
  std::vector<ServerId> base;
  ServerId next = 0;
  for (std::size_t k = 1; k <= depth; ++k) {
    base.push_back(next);
    for (std::size_t i = 1; i < k; ++i)
      arrivals.push_back({static_cast<ServerId>(next + static_cast<ServerId>(i) - 1), static_cast<ServerId>(next + static_cast<ServerId>(i))});
    next += static_cast<ServerId>(k);
  }
  StarChain out;
  for (std::size_t k = 0; k < depth; ++k) {
    out.key_clients.push_back(static_cast<ClientId>(arrivals.size()));
    arrivals.push_back({base[k]});
  }
  out.instance = ArrivalInstance(static_cast<std::size_t>(next), std::move(arrivals));
  return out;
}

enum class GenKind { kRandom, kComplete, kStarChain, kAdversary };

struct GenSpec {
  GenKind kind = GenKind::kRandom;
  std::size_t servers = 0;
  std::size_t clients = 0;
  std::size_t min_degree = 1;
  std::size_t max_degree = 1;
  std::size_t depth = 1;
  std::size_t L = 4;
  std::optional<std::size_t> pad_to;
  std::uint64_t seed = 0;
};

inline ArrivalInstance generate(const GenSpec& spec) {
  switch (spec.kind) {
    case GenKind::kRandom:
      return gen_random_mixed(spec.servers, spec.clients, spec.min_degree, spec.max_degree, spec.seed);
    case GenKind::kComplete:
      return gen_complete(spec.clients, spec.servers);
    case GenKind::kStarChain:
      return gen_star_chain(spec.depth).instance;
    case GenKind::kAdversary:
      return gen_minmax_adversary(spec.L, spec.pad_to).instance;
  }
  throw UsageError("unknown generator kind");
}

}  // namespace sap
