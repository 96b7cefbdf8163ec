#pragma once

namespace kpsupport {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kpsupport
