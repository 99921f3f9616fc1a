#pragma once

namespace funnelbot {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace funnelbot
