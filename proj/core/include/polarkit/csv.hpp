#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polarkit::csv {

struct Options {
    char delimiter = ',';
};

/// One physical input row. `line` is the 1-based line number in the source
/// stream (the header is line 1).
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

struct Document {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

/// Reads delimiter-separated text with a mandatory header row. Fields may be
/// double-quoted; embedded quotes are escaped by doubling. CR before LF is
/// stripped. Blank lines are skipped (but still counted for line numbers).
Document read(std::istream& in, const Options& opts = {});

/// Escapes a single field for writing (quotes only when necessary).
std::string escape_field(const std::string& field, char delimiter);

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter);

/// Formats a double so that reading it back yields the identical value.
std::string format_double(double v);

/// Strict double parser: the full field must be consumed. Returns false on
/// failure or non-finite results.
bool parse_double(const std::string& field, double& out);

std::string trim(const std::string& s);

} // namespace polarkit::csv
