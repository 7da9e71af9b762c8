// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

// Build hash is injected by the build system; "unknown" outside of it.
#ifndef UQ_BUILD_HASH
#define UQ_BUILD_HASH "unknown"
#endif

namespace uq {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kBuildHash = UQ_BUILD_HASH;

inline std::string version_string() { return std::string(kVersion) + "+" + kBuildHash; }

}  // namespace uq
