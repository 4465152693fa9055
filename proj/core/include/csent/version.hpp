#pragma once

namespace csent {

inline constexpr const char* kVersion = "0.1.0";

} // namespace csent
