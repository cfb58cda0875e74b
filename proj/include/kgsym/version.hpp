#pragma once

namespace kgsym {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kgsym
