#include "polarkit/data_table.hpp"

#include "polarkit/csv.hpp"
#include "polarkit/error.hpp"

#include <istream>
#include <ostream>

namespace polarkit {

int DataTable::find(const std::string& name) const {
    for (std::size_t i = 0; i < cols_.size(); ++i)
        if (cols_[i].name == name) return static_cast<int>(i);
    return -1;
}

DataTable::Column& DataTable::add_numeric(const std::string& name) {
    if (has_column(name))
        throw Error(errc::duplicate_key, "column already exists: " + name);
    cols_.push_back(Column{name, true, {}, {}});
    return cols_.back();
}

DataTable::Column& DataTable::add_text(const std::string& name) {
    if (has_column(name))
        throw Error(errc::duplicate_key, "column already exists: " + name);
    cols_.push_back(Column{name, false, {}, {}});
    return cols_.back();
}

std::vector<double>& DataTable::num(const std::string& name) {
    int i = find(name);
    if (i < 0) throw Error(errc::missing_column, "no column named '" + name + "'");
    Column& c = cols_[static_cast<std::size_t>(i)];
    if (!c.numeric) throw Error(errc::missing_column, "column '" + name + "' is not numeric");
    return c.num;
}

std::vector<std::string>& DataTable::text(const std::string& name) {
    int i = find(name);
    if (i < 0) throw Error(errc::missing_column, "no column named '" + name + "'");
    Column& c = cols_[static_cast<std::size_t>(i)];
    if (c.numeric) throw Error(errc::missing_column, "column '" + name + "' is not text");
    return c.text;
}

const DataTable::Column& DataTable::column(const std::string& name) const {
    int i = find(name);
    if (i < 0) throw Error(errc::missing_column, "no column named '" + name + "'");
    return cols_[static_cast<std::size_t>(i)];
}

const std::vector<double>& DataTable::numeric_column(const std::string& name) const {
    const Column& c = column(name);
    if (!c.numeric) throw Error(errc::missing_column, "column '" + name + "' is not numeric");
    return c.num;
}

const std::vector<std::string>& DataTable::text_column(const std::string& name) const {
    const Column& c = column(name);
    if (c.numeric) throw Error(errc::missing_column, "column '" + name + "' is not text");
    return c.text;
}

std::vector<std::string> DataTable::column_names() const {
    std::vector<std::string> names;
    names.reserve(cols_.size());
    for (const auto& c : cols_) names.push_back(c.name);
    return names;
}

void DataTable::write_csv(std::ostream& out, char delimiter) const {
    csv::write_row(out, column_names(), delimiter);
    const std::size_t rows = row_count();
    std::vector<std::string> fields(cols_.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols_.size(); ++c) {
            const Column& col = cols_[c];
            if (col.numeric)
                fields[c] = is_absent(col.num[r]) ? std::string() : csv::format_double(col.num[r]);
            else
                fields[c] = col.text[r];
        }
        csv::write_row(out, fields, delimiter);
    }
}

DataTable DataTable::read_csv(std::istream& in, char delimiter) {
    csv::Options opts;
    opts.delimiter = delimiter;
    csv::Document doc = csv::read(in, opts);

    const std::size_t ncols = doc.header.size();
    std::vector<std::vector<std::string>> raw(ncols);
    for (auto& v : raw) v.reserve(doc.rows.size());
    for (const auto& row : doc.rows) {
        if (row.fields.size() != ncols)
            throw Error(errc::value_out_of_range,
                        "line " + std::to_string(row.line) + ": expected " +
                            std::to_string(ncols) + " fields, got " +
                            std::to_string(row.fields.size()));
        for (std::size_t c = 0; c < ncols; ++c) raw[c].push_back(row.fields[c]);
    }

    DataTable t;
    for (std::size_t c = 0; c < ncols; ++c) {
        bool numeric = true;
        double tmp;
        for (const auto& f : raw[c]) {
            if (csv::trim(f).empty()) continue;
            if (!csv::parse_double(f, tmp)) {
                numeric = false;
                break;
            }
        }
        if (numeric) {
            auto& col = t.add_numeric(doc.header[c]);
            col.num.reserve(raw[c].size());
            for (const auto& f : raw[c]) {
                if (csv::trim(f).empty()) {
                    col.num.push_back(absent());
                } else {
                    csv::parse_double(f, tmp);
                    col.num.push_back(tmp);
                }
            }
        } else {
            auto& col = t.add_text(doc.header[c]);
            col.text = std::move(raw[c]);
        }
    }
    return t;
}

} // namespace polarkit
