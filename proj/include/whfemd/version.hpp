#pragma once

namespace whfemd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace whfemd
