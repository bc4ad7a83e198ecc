#pragma once

namespace hoqtt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hoqtt
