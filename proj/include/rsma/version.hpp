#pragma once

namespace rsma {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rsma
