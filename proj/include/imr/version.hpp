#pragma once

namespace imr {

inline constexpr const char* kToolName = "imr";
inline constexpr const char* kVersion = "0.1.0";

} // namespace imr
