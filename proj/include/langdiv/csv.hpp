#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace langdiv {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines; // physical line where each row starts

    // Index of a header column, -1 when absent.
    int column(std::string_view name) const;
};

// RFC-4180-style reader: quoted fields, doubled quotes, embedded newlines,
// CRLF tolerated. Empty file -> empty table.
CsvTable read_csv(const std::string& path);

std::string csv_escape(std::string_view field);

} // namespace langdiv
