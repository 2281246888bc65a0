// SPDX-License-Identifier: Apache-2.0

#pragma once

// Minimal CSV writer for experiment outputs. The first line names the schema
// and its version; numbers use %.17g so files round-trip and compare equal
// across runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

#include "tsfpi/errors.hpp"

namespace tsfpi::detail {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view schema,
            std::initializer_list<std::string_view> columns)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << "# schema: " << schema << '\n';
    bool first = true;
    for (auto c : columns) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  CsvWriter& operator<<(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return cell(buf);
  }
  CsvWriter& operator<<(long long v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(int v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(std::size_t v) { return cell(std::to_string(v)); }
  CsvWriter& operator<<(std::string_view v) { return cell(v); }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

  void close() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_.string());
    out_.close();
  }

 private:
  CsvWriter& cell(std::string_view text) {
    if (!first_) out_ << ',';
    out_ << text;
    first_ = false;
    return *this;
  }

  std::filesystem::path path_;
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace tsfpi::detail
