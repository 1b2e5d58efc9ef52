#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace zipfirm::csv {

/// One parsed CSV row with the 1-based physical line on which it started.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF or
/// LF line endings. Throws Error(dataset) on an unterminated quote.
std::vector<Row> read(std::string_view text);

/// Quote a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace zipfirm::csv
