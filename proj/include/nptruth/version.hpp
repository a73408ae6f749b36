#pragma once

namespace nptruth {

inline constexpr const char* version = "0.1.0";

} // namespace nptruth
