#pragma once

namespace exploss {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace exploss
