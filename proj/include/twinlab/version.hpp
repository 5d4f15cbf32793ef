#pragma once

namespace twinlab {
inline constexpr const char* kVersion = "0.1.0";
}
