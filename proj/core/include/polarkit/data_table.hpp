#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace polarkit {

inline double absent() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_absent(double v) { return std::isnan(v); }

/// Column-oriented table with a fixed column manifest. Numeric columns encode
/// absent values as NaN; in delimiter-separated output an absent cell is an
/// empty field. Immutable by convention once a producer returns it.
class DataTable {
public:
    struct Column {
        std::string name;
        bool numeric = true;
        std::vector<double> num;
        std::vector<std::string> text;

        std::size_t size() const { return numeric ? num.size() : text.size(); }
    };

    std::size_t row_count() const { return cols_.empty() ? 0 : cols_.front().size(); }
    std::size_t column_count() const { return cols_.size(); }

    /// Index of a named column, or -1.
    int find(const std::string& name) const;
    bool has_column(const std::string& name) const { return find(name) >= 0; }

    /// NOTE: adding a column may reallocate; references returned earlier by
    /// add_*/at/column are invalidated. Add every column before taking
    /// references (or use num()/text() afterwards).
    Column& add_numeric(const std::string& name);
    Column& add_text(const std::string& name);

    /// Mutable access to column storage by name (column must exist and have
    /// the right kind).
    std::vector<double>& num(const std::string& name);
    std::vector<std::string>& text(const std::string& name);

    const Column& at(std::size_t i) const { return cols_[i]; }
    Column& at(std::size_t i) { return cols_[i]; }

    /// Named access; throws MissingColumn.
    const Column& column(const std::string& name) const;

    const std::vector<double>& numeric_column(const std::string& name) const;
    const std::vector<std::string>& text_column(const std::string& name) const;

    std::vector<std::string> column_names() const;

    void write_csv(std::ostream& out, char delimiter = ',') const;

    /// Reads a table back from delimiter-separated text. A column is numeric
    /// when every non-empty field parses as a double; empty fields are absent.
    static DataTable read_csv(std::istream& in, char delimiter = ',');

private:
    std::vector<Column> cols_;
};

} // namespace polarkit
