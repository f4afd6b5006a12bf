#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iorisk {

/// Raised for any malformed input feed. Carries the 1-based line number and
/// the name of the offending column (empty for schema-level problems).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what);

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

namespace csv {

/// Splits one CSV record. Fields may be double-quoted; a doubled quote inside
/// a quoted field is a literal quote. Returns false on an unterminated quote.
bool split(std::string_view line, std::vector<std::string>& out);

/// Splits an unquoted record into views. Faster path for numeric feeds.
void split_plain(std::string_view line, std::vector<std::string_view>& out);

/// Quotes a field when it contains a comma, quote, or newline.
std::string quote(std::string_view field);

bool parse_int(std::string_view text, std::int64_t& value);
bool parse_double(std::string_view text, double& value);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Strips a trailing '\r' so CRLF feeds parse like LF feeds.
inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace csv
}  // namespace iorisk
