#include "mribow/text.hpp"

#include <charconv>
#include <system_error>

#include "mribow/error.hpp"

namespace mribow {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw NumericError("format_double failed");
    return std::string(buf, ptr);
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
    T value{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || s.empty()) {
        throw DataError("unparsable " + std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

}  // namespace

double parse_double_strict(std::string_view s, std::string_view what) {
    return parse_number<double>(s, what);
}

long long parse_int_strict(std::string_view s, std::string_view what) {
    return parse_number<long long>(s, what);
}

std::uint64_t parse_u64_strict(std::string_view s, std::string_view what) {
    return parse_number<std::uint64_t>(s, what);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace mribow
