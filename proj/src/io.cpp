#include "rdgcn/io.hpp"

#include <charconv>
#include <fstream>

#include "rdgcn/error.hpp"

namespace rdgcn {

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw InternalError("failed to format double");
    return std::string(buf, ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
    uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[hash & 0xf];
        hash >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("short write to '" + path + "'");
}

void write_curve_csv(std::ostream& out, const std::vector<std::pair<int, double>>& samples) {
    for (const auto& [t, weight] : samples) {
        out << t << ',' << format_double(weight) << '\n';
    }
}

}  // namespace rdgcn
