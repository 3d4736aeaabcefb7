#pragma once

namespace phaseflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace phaseflow
