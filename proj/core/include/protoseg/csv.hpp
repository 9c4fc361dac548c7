#ifndef PROTOSEG_CSV_HPP
#define PROTOSEG_CSV_HPP

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace protoseg::csv {

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);

/// Streaming reader. Lines starting with '#' and blank lines are skipped; the
/// first remaining line is the header.
class Reader {
 public:
  explicit Reader(std::istream& in);

  /// Throws SchemaError("missing required column ...") when absent.
  std::size_t require(std::string_view column) const;
  std::optional<std::size_t> find(std::string_view column) const;
  const std::vector<std::string>& header() const noexcept { return header_; }

  /// Reads the next data row; false at end of input.
  bool next(std::vector<std::string>& row);
  /// 1-based physical line number of the last row returned.
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t line_ = 0;
};

}  // namespace protoseg::csv

#endif  // PROTOSEG_CSV_HPP
