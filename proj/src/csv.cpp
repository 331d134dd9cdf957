#include "georank/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "georank/core.hpp"

namespace georank::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::istream& in = *in_;
  int c = in.get();
  if (c == EOF) return false;

  record_line_ = next_line_;
  std::string field;
  bool quoted = false;
  bool any = false;

  while (true) {
    if (c == EOF) {
      fields.push_back(std::move(field));
      return true;
    }
    if (quoted) {
      if (c == '"') {
        const int peek = in.peek();
        if (peek == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++next_line_;
        field.push_back(static_cast<char>(c));
      }
    } else if (c == '"' && field.empty() && !any) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = false;
      c = in.get();
      continue;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get();
      ++next_line_;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(static_cast<char>(c));
    }
    any = true;
    c = in.get();
  }
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") != std::string::npos) {
      out << '"';
      for (char ch : f) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << f;
    }
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, std::size_t line, std::string_view what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError("line " + std::to_string(line) + ": invalid " + std::string(what) + " '" +
                     std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_uint(std::string_view text, std::size_t line, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError("line " + std::to_string(line) + ": invalid " + std::string(what) + " '" +
                     std::string(text) + "'");
  }
  return value;
}

}  // namespace georank::csv
