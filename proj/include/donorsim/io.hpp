#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "donorsim/types.hpp"

namespace donorsim {

/// Shortest decimal that round-trips; "nan", "inf", "-inf" for non-finite values.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

/// Rectangular result table. Cells hold numbers, strings, booleans or null.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;

    Table() = default;
    Table(std::string n, std::vector<std::string> cols) : name(std::move(n)), columns(std::move(cols)) {}

    void add(std::vector<nlohmann::json> row) {
        require(row.size() == columns.size(), "table " + name + ": row width differs from the header");
        rows.push_back(std::move(row));
    }
};

namespace detail {
inline std::string csv_cell(const nlohmann::json& c) {
    if (c.is_null()) return "";
    if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
    if (c.is_number_integer()) return c.dump();
    if (c.is_number()) return format_number(c.get<double>());
    const std::string s = c.is_string() ? c.get<std::string>() : c.dump();
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}
}  // namespace detail

/// Header row, comma separator, LF line endings.
inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
        if (k) out += ',';
        out += detail::csv_cell(t.columns[k]);
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += detail::csv_cell(row[k]);
        }
        out += '\n';
    }
    return out;
}

/// Array of row objects keyed by column name.
inline nlohmann::json to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t k = 0; k < row.size(); ++k) r[t.columns[k]] = row[k];
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Key order is sorted (nlohmann::json objects are ordered maps).
inline std::string dump_json(const nlohmann::json& j, int indent = -1) {
    return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw InvalidArgument("failed writing " + path.string());
}

}  // namespace donorsim
