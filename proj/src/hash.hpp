// hash.hpp - content hashing for record ids and image file names
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tabscore {

// FNV-1a, 64-bit. Stable across platforms and good enough for
// content-addressed file names at corpus scale.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string content_hash(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace tabscore
