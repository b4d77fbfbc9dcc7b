#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace revex::csv {

struct Row {
    std::size_t line = 0;  // 1-based physical line where the row starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
/// quoted fields may span lines. Blank lines are skipped.
std::vector<Row> parse(std::string_view content);

}  // namespace revex::csv
