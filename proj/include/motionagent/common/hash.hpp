#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace motionagent {

std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// splitmix64 step; used wherever a cheap, platform-stable PRNG is needed.
std::uint64_t splitmix64(std::uint64_t& state);

} // namespace motionagent
