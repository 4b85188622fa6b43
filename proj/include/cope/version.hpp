#pragma once

namespace cope {
inline constexpr const char* kVersion = "0.1.0";
}
