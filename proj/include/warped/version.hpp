#pragma once

namespace warped {

inline constexpr const char* kVersion = "0.1.0";

} // namespace warped
