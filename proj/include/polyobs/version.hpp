#pragma once

namespace polyobs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace polyobs
