#include "mribow/hash.hpp"

#include <fstream>

#include "mribow/error.hpp"

namespace mribow {

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file '" + path.string() + "'");
    std::uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        std::streamsize got = in.gcount();
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(got)), h);
    }
    return h;
}

std::string to_hex(std::uint64_t h) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace mribow
