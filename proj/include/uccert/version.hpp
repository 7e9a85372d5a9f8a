#pragma once

namespace uccert {

inline constexpr const char* version_string = "0.1.0";

}  // namespace uccert
