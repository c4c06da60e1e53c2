#pragma once

namespace sads_dirac {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sads_dirac
