#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace effortnn {

/// A delimited text table: header row plus data rows, all cells as text.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    char delimiter = ',';
};

/// Parses comma- or tab-delimited text (RFC 4180 quoting, CRLF or LF line
/// ends, optional UTF-8 BOM). The delimiter is tab when the header line
/// contains a tab, comma otherwise. Blank lines are skipped.
Table parse_delimited(std::string_view text);

std::string write_delimited(const Table& table);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

std::string trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string digest_hex(std::string_view bytes);

}  // namespace effortnn
