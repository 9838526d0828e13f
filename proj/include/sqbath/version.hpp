#pragma once

namespace sqbath {

inline constexpr const char* kToolName = "sqbath";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace sqbath
