#pragma once

namespace dualest {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dualest
