#pragma once

namespace geoexp {
inline constexpr const char* kVersion = "0.1.0";
}
