#pragma once

namespace thermi {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace thermi
