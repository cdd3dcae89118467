#pragma once

namespace fermispec {
inline constexpr const char* version = "0.1.0";
}
