#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nonmarkov::cli {

// Shortest round-trip decimal form of a finite double.
std::string format_double(double value);

// Comma-separated numeric table: one header line, then rows. Comment lines
// ("# ...") are written after the rows, in insertion order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<std::string>& comments() const { return comments_; }

  // Throws DomainError on a width mismatch or a non-finite value.
  void add_row(std::vector<double> row);
  void add_comment(std::string text);
  void append(const CsvTable& other);

  void write(std::ostream& out) const;
  std::string str() const;
  // Rendered in memory, then written in one go; ConfigError if the file
  // cannot be opened.
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> comments_;
};

}  // namespace nonmarkov::cli
