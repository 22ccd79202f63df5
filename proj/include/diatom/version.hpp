#pragma once

namespace diatom {

inline constexpr const char* version = "0.1.0";

} // namespace diatom
