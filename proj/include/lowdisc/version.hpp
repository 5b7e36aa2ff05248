#pragma once

namespace lowdisc {
inline constexpr const char* kVersion = "0.3.0";
}
