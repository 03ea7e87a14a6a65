#pragma once

namespace qtrack {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qtrack
