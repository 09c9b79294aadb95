#pragma once

namespace topiclabel {
inline constexpr const char* kVersion = "1.0.0";
}
