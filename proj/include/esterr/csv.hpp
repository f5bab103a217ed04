#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace esterr {

/// Shortest decimal that parses back to the same double ("nan", "inf", "-inf" otherwise).
std::string format_double(double v);

using CsvCell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<CsvCell> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  std::string str() const;
  /// Throws Error(Io) when the file cannot be written.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

/// Writes `content` to `path`, creating parent directories. Throws Error(Io).
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace esterr
