#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sap/errors.hpp"

namespace sap {

using ClientId = std::int32_t;
using ServerId = std::int32_t;

/// Fixed server side plus an ordered sequence of arriving clients.
///
/// Client ids are the arrival positions 0..n-1. Neighbor lists are sorted and
/// deduplicated. Capacities, when present, cover every server; absent means
/// every server has capacity 1.
class ArrivalInstance {
 public:
  ArrivalInstance() = default;

  ArrivalInstance(std::size_t server_count, std::vector<std::vector<ServerId>> arrivals,
                  std::optional<std::vector<std::int32_t>> capacities = std::nullopt)
      : server_count_(server_count), arrivals_(std::move(arrivals)), capacities_(std::move(capacities)) {
    validate();
  }

  std::size_t server_count() const { return server_count_; }
  std::size_t client_count() const { return arrivals_.size(); }

  std::span<const ServerId> neighbors(ClientId c) const {
    return arrivals_.at(static_cast<std::size_t>(c));
  }
  const std::vector<std::vector<ServerId>>& arrivals() const { return arrivals_; }

  bool has_capacities() const { return capacities_.has_value(); }
  const std::optional<std::vector<std::int32_t>>& capacities() const { return capacities_; }
  std::int32_t capacity(ServerId s) const {
    return capacities_ ? (*capacities_)[static_cast<std::size_t>(s)] : 1;
  }
  bool unit_capacities() const {
    return !capacities_ || std::all_of(capacities_->begin(), capacities_->end(),
                                       [](std::int32_t u) { return u == 1; });
  }

  bool adjacent(ClientId c, ServerId s) const {
    const auto nb = neighbors(c);
    return std::binary_search(nb.begin(), nb.end(), s);
  }

  /// The first `length` arrivals, same server side and capacities.
  ArrivalInstance prefix(std::size_t length) const {
    if (length > arrivals_.size()) throw UsageError("prefix longer than instance");
    return ArrivalInstance(server_count_,
                           std::vector<std::vector<ServerId>>(arrivals_.begin(),
                                                              arrivals_.begin() + static_cast<std::ptrdiff_t>(length)),
                           capacities_);
  }

  friend bool operator==(const ArrivalInstance&, const ArrivalInstance&) = default;

 private:
  void validate() const {
    for (std::size_t c = 0; c < arrivals_.size(); ++c) {
      const auto& nb = arrivals_[c];
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (nb[i] < 0 || static_cast<std::size_t>(nb[i]) >= server_count_)
          throw UsageError("client " + std::to_string(c) + ": neighbor " + std::to_string(nb[i]) +
                           " out of range");
        if (i > 0 && nb[i - 1] >= nb[i])
          throw UsageError("client " + std::to_string(c) + ": neighbor list not sorted/deduplicated");
      }
    }
    if (capacities_) {
      if (capacities_->size() != server_count_) throw UsageError("capacities must cover every server");
      for (std::size_t s = 0; s < capacities_->size(); ++s)
        if ((*capacities_)[s] < 1)
          throw UsageError("server " + std::to_string(s) + ": capacity must be >= 1");
    }
  }

  std::size_t server_count_ = 0;
  std::vector<std::vector<ServerId>> arrivals_;
  std::optional<std::vector<std::int32_t>> capacities_;
};

/// Sorts and deduplicates a neighbor list in place.
inline std::vector<ServerId> normalized_neighbors(std::vector<ServerId> nb) {
  std::sort(nb.begin(), nb.end());
  nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  return nb;
}

}  // namespace sap
