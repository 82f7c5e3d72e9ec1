#pragma once

namespace pdwg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pdwg
