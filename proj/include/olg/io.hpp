#pragma once
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "olg/errors.hpp"

namespace olg {

// Numeric output uses 12 significant digits throughout.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// The value a 12-significant-digit rendering parses back to.
inline double round_to_output_precision(double v) {
    return std::strtod(format_number(v).c_str(), nullptr);
}

// RFC 4180 quoting: fields containing comma, quote or newline are quoted,
// with embedded quotes doubled.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// Reads one CSV record (quotes may span physical lines). Returns false at
// end of stream with no data consumed.
inline bool read_csv_record(std::istream& is, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool quoted = false;
    bool any = false;
    int c;
    while ((c = is.get()) != EOF) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    field += '"';
                    is.get();
                } else {
                    quoted = false;
                }
            } else {
                field += static_cast<char>(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (is.peek() == '\n') is.get();
            break;
        } else {
            field += static_cast<char>(c);
        }
    }
    if (quoted) throw invalid_parameter("csv: unterminated quoted field");
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

inline double parse_number(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw invalid_parameter(std::string("csv: malformed number in column ") + what +
                                ": '" + s + "'");
    return v;
}

// Writes via a temp file in the same directory and renames into place, so a
// concurrent reader never observes a partial file.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace olg
