#ifndef ZSO_CSV_HPP
#define ZSO_CSV_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace zso::csv {

struct Row {
    std::size_t line = 0; // 1-based line where the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may hold commas, CR/LF and doubled quotes.
/// A UTF-8 byte order mark is dropped; blank lines are skipped.
inline std::vector<Row> parse(std::string_view input)
{
    if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);

    std::vector<Row> rows;
    Row current;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool row_has_content = false;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (row_has_content) rows.push_back(std::move(current));
        current = Row{};
        row_has_content = false;
    };

    while (i < input.size()) {
        const char c = input[i];
        if (c == '"') {
            if (!field.empty()) throw LineError(ErrorCode::MalformedCsv, line, "quote inside unquoted field");
            row_has_content = true;
            const std::size_t opened_at = line;
            ++i;
            for (;;) {
                if (i >= input.size()) throw LineError(ErrorCode::MalformedCsv, opened_at, "unterminated quoted field");
                const char q = input[i];
                if (q == '"') {
                    if (i + 1 < input.size() && input[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (q == '\n') ++line;
                field += q;
                ++i;
            }
            if (i < input.size() && input[i] != ',' && input[i] != '\n' && input[i] != '\r')
                throw LineError(ErrorCode::MalformedCsv, line, "unexpected character after closing quote");
            continue;
        }
        if (c == ',') {
            row_has_content = true;
            end_field();
            ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            end_row();
            if (c == '\r' && i + 1 < input.size() && input[i + 1] == '\n') ++i;
            ++i;
            ++line;
            current.line = line;
            continue;
        }
        row_has_content = true;
        field += c;
        ++i;
    }
    if (row_has_content || !field.empty()) end_row();
    return rows;
}

/// Quotes a field only when it needs it.
inline std::string quote(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace zso::csv

#endif // ZSO_CSV_HPP
