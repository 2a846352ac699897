#include "ssb/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace ssb {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), n_columns_(columns.size()) {
  if (!out_) {
    throw std::runtime_error("CsvWriter: cannot open " + path);
  }
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_) {
    throw std::invalid_argument("CsvWriter: wrong cell count for " + path_);
  }
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) {
    throw std::runtime_error("CsvWriter: write failed for " + path_);
  }
}

}  // namespace ssb
