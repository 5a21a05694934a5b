#pragma once

namespace bcw {

inline constexpr const char* version = "0.1.0";

}  // namespace bcw
