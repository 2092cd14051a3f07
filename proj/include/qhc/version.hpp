#pragma once

namespace qhc {
inline constexpr const char* kVersion = "0.1.0";
}
