#include "revex/csv.hpp"

#include "revex/error.hpp"

namespace revex::csv {

std::vector<Row> parse(std::string_view content) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    row.line = 1;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        if (!(row.fields.empty() && field.empty() && !field_started)) {
            end_field();
            rows.push_back(std::move(row));
        }
        row = Row{};
        row.line = line;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) {
                    throw ValidationError("csv line " + std::to_string(line) +
                                          ": unexpected quote inside unquoted field");
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                end_row();
                break;
            default:
                field.push_back(c);
        }
    }
    if (in_quotes) {
        throw ValidationError("csv line " + std::to_string(row.line) + ": unterminated quoted field");
    }
    end_row();
    return rows;
}

}  // namespace revex::csv
