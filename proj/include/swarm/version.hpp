#pragma once

namespace swarm {
inline constexpr const char* kToolVersion = "0.1.0";
}
