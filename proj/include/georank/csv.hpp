#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace georank::csv {

/// Record-at-a-time CSV reader with RFC 4180 quoting (quoted fields may
/// contain commas, quotes, and newlines). Keeps the 1-based line number of
/// the current record for error messages.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(&in) {}

  /// Reads the next record into `fields`; returns false at end of input.
  bool next(std::vector<std::string>& fields);

  std::size_t line() const { return record_line_; }

 private:
  std::istream* in_;
  std::size_t next_line_ = 1;
  std::size_t record_line_ = 0;
};

/// Writes one record, quoting fields that contain commas, quotes, or newlines.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

/// Parses a double; throws InputError naming `what` and the line number.
double parse_double(std::string_view text, std::size_t line, std::string_view what);

/// Parses a non-negative integer; throws InputError like parse_double.
std::uint64_t parse_uint(std::string_view text, std::size_t line, std::string_view what);

}  // namespace georank::csv
