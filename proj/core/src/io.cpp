#include "qanneal/io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qa::io {

std::string format_sig17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    // LC_NUMERIC is never set by this library, but guard against an
    // embedding application having switched the decimal separator
    for (char& c : buf) {
        if (c == '\0') break;
        if (c == ',') c = '.';
    }
    return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) {
    row_mixed(names);
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_sig17(v));
    row_mixed(cells);
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += cells[i];
    }
    buf_ += '\n';
}

namespace {

inline std::uint32_t rol(std::uint32_t v, int n) {
    return (v << n) | (v >> (32 - n));
}

}  // namespace

std::string sha1_hex(std::string_view bytes) {
    std::array<std::uint32_t, 5> h = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu,
                                      0x10325476u, 0xC3D2E1F0u};
    const std::uint64_t ml = static_cast<std::uint64_t>(bytes.size()) * 8;
    std::string msg(bytes);
    msg += static_cast<char>(0x80);
    while (msg.size() % 64 != 56) msg += '\0';
    for (int i = 7; i >= 0; --i)
        msg += static_cast<char>((ml >> (8 * i)) & 0xFF);

    std::uint32_t w[80];
    for (size_t chunk = 0; chunk < msg.size(); chunk += 64) {
        for (int i = 0; i < 16; ++i)
            w[i] = (static_cast<std::uint32_t>(
                        static_cast<unsigned char>(msg[chunk + 4 * i]))
                    << 24) |
                   (static_cast<std::uint32_t>(
                        static_cast<unsigned char>(msg[chunk + 4 * i + 1]))
                    << 16) |
                   (static_cast<std::uint32_t>(
                        static_cast<unsigned char>(msg[chunk + 4 * i + 2]))
                    << 8) |
                   static_cast<std::uint32_t>(
                       static_cast<unsigned char>(msg[chunk + 4 * i + 3]));
        for (int i = 16; i < 80; ++i)
            w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | ((~b) & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t t = rol(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = t;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
    }
    std::string out;
    out.reserve(40);
    static const char* hex = "0123456789abcdef";
    for (std::uint32_t v : h)
        for (int i = 7; i >= 0; --i) out += hex[(v >> (4 * i)) & 0xF];
    return out;
}

void write_file(const std::filesystem::path& p, std::string_view content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("write_file: cannot open " + p.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write_file: short write " + p.string());
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("read_file: cannot open " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace qa::io
