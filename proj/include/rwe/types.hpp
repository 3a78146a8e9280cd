#pragma once

#include <cstdint>

namespace rwe {

/// Dense vertex/entity index; both sides of every graph fit comfortably.
using Index = std::int32_t;

}  // namespace rwe
