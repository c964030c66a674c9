#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>

#include "modnet/estimator.hpp"
#include "modnet/ids.hpp"

namespace modnet {

struct UserProfile {
  UserId user_id;
  std::map<ModelId, FitEstimate> estimates;
};

struct Neighbor {
  const UserProfile* profile;
  double similarity;
};

/// Pearson correlation of empirical means over models both users have
/// sampled. nullopt when fewer than `min_overlap` models overlap; 0 when either
/// side's means are constant on the overlap.
std::optional<double> similarity(const UserProfile& u, const UserProfile& v,
                                 std::uint32_t min_overlap);

/// Similarity-weighted mean of neighbor estimates for `model`, counting only
/// neighbors with data on it and positive similarity. nullopt when no such
/// neighbor exists. Throws StateError if `user` already has data on `model`.
std::optional<double> predict_fit(const UserProfile& user, ModelId model,
                                  std::span<const Neighbor> neighbors);

}  // namespace modnet
