#pragma once

namespace brw {

inline constexpr const char* kVersion = "1.0.0";

/// Identifier of the sampling stack: engine plus the distribution algorithms
/// layered on it. Bump when any draw-consuming code path changes.
inline constexpr const char* kRngId = "mt19937_64-v1";

}  // namespace brw
