#include "langdiv/csv.hpp"

#include "langdiv/errors.hpp"

#include <fstream>
#include <sstream>

namespace langdiv {

int CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    std::size_t line = 1;
    std::size_t row_start_line = 1;
    bool in_quotes = false;
    bool row_has_data = false;
    bool got_header = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (!got_header) {
            table.header = std::move(row);
            got_header = true;
        } else {
            table.rows.push_back(std::move(row));
            table.row_lines.push_back(row_start_line);
        }
        row.clear();
        row_has_data = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!row_has_data && field.empty()) row_start_line = line;
            in_quotes = true;
            row_has_data = true;
            break;
        case ',':
            end_field();
            row_has_data = true;
            break;
        case '\r':
            break; // CRLF handled by the following '\n'
        case '\n':
            if (row_has_data || !field.empty() || !row.empty()) end_row();
            ++line;
            row_start_line = line;
            break;
        default:
            if (!row_has_data && field.empty()) row_start_line = line;
            field += c;
            row_has_data = true;
            break;
        }
    }
    if (in_quotes) throw DataError(path + ": unterminated quoted field");
    if (row_has_data || !field.empty() || !row.empty()) end_row();
    return table;
}

std::string csv_escape(std::string_view field) {
    const bool needs_quotes =
        field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace langdiv
