#pragma once

namespace octodyson {
inline constexpr const char* kVersion = "0.1.0";
}
