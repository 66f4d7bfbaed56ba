#pragma once

namespace wishart {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wishart
