#pragma once

#include <string_view>

namespace coactiv {

inline constexpr std::string_view kVersion = "0.1.0";

#ifdef COACTIV_BUILD_ID
inline constexpr std::string_view kBuildId = COACTIV_BUILD_ID;
#else
inline constexpr std::string_view kBuildId = "unknown";
#endif

}  // namespace coactiv
