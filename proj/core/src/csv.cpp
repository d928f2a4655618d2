#include "polarkit/csv.hpp"

#include "polarkit/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace polarkit::csv {

namespace {

// Splits one physical line. Quoted fields may contain the delimiter and
// doubled quotes; multi-line quoted fields are not supported.
std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool is_blank(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Document read(std::istream& in, const Options& opts) {
    Document doc;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) continue;
        if (doc.header.empty()) {
            doc.header = split_line(line, opts.delimiter);
            for (auto& h : doc.header) h = trim(h);
            continue;
        }
        Row row;
        row.line = lineno;
        row.fields = split_line(line, opts.delimiter);
        doc.rows.push_back(std::move(row));
    }
    if (doc.header.empty())
        throw Error(errc::malformed_header, "input is empty, expected a header row");
    return doc;
}

std::string escape_field(const std::string& field, char delimiter) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == delimiter || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(delimiter);
        out << escape_field(fields[i], delimiter);
    }
    out.put('\n');
}

std::string format_double(double v) {
    char buf[40];
    // Shortest representation that round-trips.
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    if (std::sscanf(buf, "%lf", &back) == 1 && back == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            if (std::sscanf(shorter, "%lf", &back) == 1 && back == v)
                return shorter;
        }
    }
    return buf;
}

bool parse_double(const std::string& field, double& out) {
    const std::string t = trim(field);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) return false;
    return std::isfinite(out);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace polarkit::csv
