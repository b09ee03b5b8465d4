#pragma once

#include <string_view>

namespace stf {

inline constexpr std::string_view kToolName = "stf";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace stf
