#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace brd::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the row starts
};

/// RFC-4180: comma separated, CRLF or LF line ends, quoted fields with doubled
/// quotes. A UTF-8 byte order mark is skipped. Blank lines are ignored.
/// Throws Error(Schema) on an unterminated quote.
std::vector<Row> parse(std::string_view text, const std::string& source);

/// Quotes the field when it contains a comma, quote, CR or LF.
std::string quote(std::string_view field);

}  // namespace brd::csv
