#pragma once

namespace gpelab {

inline constexpr const char* version = "0.1.0";

}  // namespace gpelab
