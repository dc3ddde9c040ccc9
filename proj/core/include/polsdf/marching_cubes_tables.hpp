#pragma once

#include <array>
#include <cstdint>

namespace polsdf::mc {

// Triangle list per cube configuration, edge ids terminated by -1.
extern const std::array<std::array<int8_t, 16>, 256> kTriTable;

}  // namespace polsdf::mc
