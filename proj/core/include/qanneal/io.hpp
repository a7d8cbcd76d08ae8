#pragma once

// Deterministic result emission: CSV with 17 significant digits ('.'
// decimal, no separators), SHA-1 content hashes, whole-file writes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qa::io {

// Shortest-round-trip-safe formatting: %.17g with '.' decimal.
std::string format_sig17(double x);

// In-memory CSV accumulator; payload() is the exact byte content.
class CsvWriter {
  public:
    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    const std::string& payload() const { return buf_; }

  private:
    std::string buf_;
};

// Lowercase hex SHA-1 of the bytes (content hashing for metadata).
std::string sha1_hex(std::string_view bytes);

void write_file(const std::filesystem::path& p, std::string_view content);
std::string read_file(const std::filesystem::path& p);

}  // namespace qa::io
