#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace modnet {

/// Index-backed identifiers. Ordering follows declaration order in the
/// scenario, which is the total order used for tie-breaks.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(Id, Id) = default;
};

using ModelId = Id<struct ModelTag>;
using ServerId = Id<struct ServerTag>;
using UserId = Id<struct UserTag>;

}  // namespace modnet
