#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace mribow {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

/// FNV-1a 64-bit over raw bytes. Used for artifact provenance, not security.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffset) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

/// Streams a file through FNV-1a. Throws DataError on I/O failure.
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

std::string to_hex(std::uint64_t h);

}  // namespace mribow
