#include "nonmarkov/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nonmarkov/errors.hpp"

namespace nonmarkov::cli {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw DomainError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != header_.size()) {
    throw DomainError("CsvTable: row has " + std::to_string(row.size()) + " fields, expected " +
                      std::to_string(header_.size()));
  }
  for (double x : row) {
    if (!std::isfinite(x)) throw DomainError("CsvTable: non-finite value");
  }
  rows_.push_back(std::move(row));
}

void CsvTable::add_comment(std::string text) { comments_.push_back(std::move(text)); }

void CsvTable::append(const CsvTable& other) {
  if (other.header_ != header_) throw DomainError("CsvTable::append: header mismatch");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  comments_.insert(comments_.end(), other.comments_.begin(), other.comments_.end());
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t k = 0; k < header_.size(); ++k) out << (k ? "," : "") << header_[k];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
  for (const auto& c : comments_) out << "# " << c << '\n';
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void CsvTable::save(const std::filesystem::path& path) const {
  const std::string text = str();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

}  // namespace nonmarkov::cli
