#pragma once

// CSV emit/ingest: UTF-8, comma separated, '.' decimal point, one header row.
// Numbers use the shortest representation that round-trips exactly, so output
// is byte-stable and re-reads bit-identically.  Files are written to a
// temporary path and renamed into place.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protectosim/errors.hpp"

namespace protectosim::io {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double_strict(std::string_view token, const std::string& where) {
    const std::string s{token};
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw Error(where + ": not a number: '" + s + "'");
    return v;
}

inline void atomic_write_text(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(const std::filesystem::path& path,
                      std::span<const std::string> header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i)
            out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    atomic_write_text(path, out);
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open CSV file '" + path.string() + "'");
    CsvTable table;
    std::string line;
    int line_no = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const auto comma = s.find(',', pos);
            if (comma == std::string::npos) {
                cells.push_back(s.substr(pos));
                break;
            }
            cells.push_back(s.substr(pos, comma - pos));
            pos = comma + 1;
        }
        return cells;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        ++line_no;
        if (line_no == 1) {
            table.header = split(line);
            continue;
        }
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size())
            throw Error(path.string() + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(table.header.size()) +
                        " columns, got " + std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells)
            row.push_back(parse_double_strict(
                cell, path.string() + ":" + std::to_string(line_no)));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty())
        throw Error(path.string() + ": empty CSV");
    return table;
}

} // namespace protectosim::io
