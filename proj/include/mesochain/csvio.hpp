// Deterministic CSV emission and content checksums for the report files.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mesochain {

// Scientific notation with 16 significant digits; '.' decimal separator.
std::string format_number(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);

  // Byte-deterministic serialization: header line then rows, '\n' endings.
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

// FNV-1a 64-bit hash of a byte string, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace mesochain
