#pragma once

namespace mflab {
inline constexpr const char* kVersion = "0.1.0";
}
