#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace schedopt {

/// Shortest round-trip decimal form, locale-independent ('.' decimal point).
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

/// Writes through a temporary file and renames into place.
inline void write_file_atomic(const std::string& path,
                              const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

/// Minimal CSV accumulator; cells are appended per row and the file is
/// written atomically on save.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::string& header) { buffer_ = header + "\n"; }

  CsvBuilder& cell(const std::string& v) {
    if (!row_.empty()) row_ += ",";
    row_ += v;
    return *this;
  }
  CsvBuilder& cell(double v) { return cell(format_double(v)); }
  CsvBuilder& cell(int v) { return cell(std::to_string(v)); }
  CsvBuilder& cell(long v) { return cell(std::to_string(v)); }

  void end_row() {
    buffer_ += row_ + "\n";
    row_.clear();
  }

  const std::string& content() const { return buffer_; }
  void save(const std::string& path) const { write_file_atomic(path, buffer_); }

 private:
  std::string buffer_;
  std::string row_;
};

}  // namespace schedopt
