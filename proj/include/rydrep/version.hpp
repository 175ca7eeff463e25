#pragma once

namespace rydrep {

inline constexpr const char* kToolName = "repcli";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace rydrep
