#include "polarkit/report.hpp"

#include "polarkit/csv.hpp"
#include "polarkit/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace polarkit {

namespace {

using nlohmann::json;

std::string snprintf_str(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

json coefficients_json(const RegressionResult& r) {
    json terms = json::array();
    for (std::size_t j = 0; j < r.names.size(); ++j) {
        terms.push_back({{"term", r.names[j]},
                         {"estimate", r.beta[j]},
                         {"std_error", r.se[j]},
                         {"t_stat", std::isfinite(r.t_stats[j]) ? json(r.t_stats[j]) : json()},
                         {"p_value", r.p_values[j]},
                         {"stars", significance_stars(r.p_values[j])},
                         {"is_dummy", static_cast<bool>(r.is_dummy[j])}});
    }
    return terms;
}

} // namespace

std::string format_estimate(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    if (v == 0.0) return "0.0000";
    return std::abs(v) >= 1e-3 ? snprintf_str("%.4f", v) : snprintf_str("%.4g", v);
}

std::string format_se(double v) {
    if (!std::isfinite(v)) return "inf";
    return snprintf_str("%.3g", v);
}

std::string format_count(std::size_t n) {
    std::string digits = std::to_string(n);
    std::string out;
    const std::size_t len = digits.size();
    for (std::size_t i = 0; i < len; ++i) {
        if (i > 0 && (len - i) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

std::string coefficient_table_text(std::span<const RegressionResult> models,
                                   std::string_view title) {
    // Row order: union of coefficient names, first-model order first.
    std::vector<std::string> row_names;
    for (const auto& m : models)
        for (const auto& name : m.names)
            if (std::find(row_names.begin(), row_names.end(), name) == row_names.end())
                row_names.push_back(name);

    auto cell = [](const RegressionResult& m, const std::string& name) -> std::string {
        auto it = std::find(m.names.begin(), m.names.end(), name);
        if (it == m.names.end()) return "";
        const std::size_t j = static_cast<std::size_t>(it - m.names.begin());
        return format_estimate(m.beta[j]) + significance_stars(m.p_values[j]) + " (" +
               format_se(m.se[j]) + ")";
    };

    const std::vector<std::string> footer_labels = {"Observations", "R-squared",
                                                    "Adjusted R-squared", "F-statistic"};
    auto footer_cell = [](const RegressionResult& m, std::size_t row) -> std::string {
        switch (row) {
        case 0: return format_count(m.n);
        case 1: return snprintf_str("%.3f", m.r2);
        case 2: return snprintf_str("%.3f", m.adj_r2);
        case 3:
            return (std::isfinite(m.f_stat) ? snprintf_str("%.1f", m.f_stat) : std::string("inf")) +
                   significance_stars(m.f_p_value);
        }
        return "";
    };

    std::size_t label_width = 0;
    for (const auto& name : row_names) label_width = std::max(label_width, name.size());
    for (const auto& label : footer_labels) label_width = std::max(label_width, label.size());

    std::vector<std::size_t> col_width(models.size());
    for (std::size_t c = 0; c < models.size(); ++c) {
        col_width[c] = models[c].model_name.empty() ? models[c].outcome.size()
                                                    : models[c].model_name.size();
        for (const auto& name : row_names)
            col_width[c] = std::max(col_width[c], cell(models[c], name).size());
        for (std::size_t f = 0; f < footer_labels.size(); ++f)
            col_width[c] = std::max(col_width[c], footer_cell(models[c], f).size());
    }

    std::size_t total = label_width;
    for (auto w : col_width) total += 2 + w;

    std::ostringstream out;
    const std::string rule(total, '-');
    out << title << "\n" << rule << "\n";
    out << pad_right("", label_width);
    for (std::size_t c = 0; c < models.size(); ++c)
        out << "  "
            << pad_right(models[c].model_name.empty() ? models[c].outcome : models[c].model_name,
                         col_width[c]);
    out << "\n" << rule << "\n";
    for (const auto& name : row_names) {
        out << pad_right(name, label_width);
        for (std::size_t c = 0; c < models.size(); ++c)
            out << "  " << pad_right(cell(models[c], name), col_width[c]);
        out << "\n";
    }
    out << rule << "\n";
    for (std::size_t f = 0; f < footer_labels.size(); ++f) {
        out << pad_right(footer_labels[f], label_width);
        for (std::size_t c = 0; c < models.size(); ++c)
            out << "  " << pad_right(footer_cell(models[c], f), col_width[c]);
        out << "\n";
    }
    out << rule << "\n";
    out << "*** p<0.01, ** p<0.05, * p<0.1. Standard errors in parentheses.\n";
    bool any_dummy = false;
    for (const auto& m : models)
        for (auto d : m.is_dummy) any_dummy = any_dummy || d;
    if (any_dummy)
        out << "Baseline categorical levels are absorbed by the intercept; one dummy per\n"
               "remaining level (a full set of level coefficients plus an intercept would\n"
               "be singular).\n";
    return out.str();
}

std::string vif_table_text(const VifReport& report, std::string_view title) {
    std::size_t label_width = std::string("Variable").size();
    for (const auto& e : report.entries) label_width = std::max(label_width, e.name.size());
    std::ostringstream out;
    const std::string rule(label_width + 12, '-');
    out << title << "\n" << rule << "\n";
    out << pad_right("Variable", label_width) << "  VIF\n" << rule << "\n";
    for (const auto& e : report.entries) {
        out << pad_right(e.name, label_width) << "  ";
        if (e.infinite)
            out << "inf (collinear)";
        else
            out << snprintf_str("%.2f", e.vif);
        out << "\n";
    }
    out << rule << "\n";
    return out.str();
}

std::string regression_csv(const RegressionResult& result, char delimiter) {
    std::ostringstream out;
    csv::write_row(out, {"term", "estimate", "std_error", "t_stat", "p_value", "stars"}, delimiter);
    for (std::size_t j = 0; j < result.names.size(); ++j) {
        csv::write_row(out,
                       {result.names[j], csv::format_double(result.beta[j]),
                        csv::format_double(result.se[j]),
                        std::isfinite(result.t_stats[j]) ? csv::format_double(result.t_stats[j])
                                                         : std::string(),
                        csv::format_double(result.p_values[j]),
                        significance_stars(result.p_values[j])},
                       delimiter);
    }
    return out.str();
}

std::string regression_json(const RegressionResult& r) {
    json doc;
    doc["model"] = {{"name", r.model_name}, {"outcome", r.outcome}};
    doc["coefficients"] = coefficients_json(r);
    doc["fit"] = {{"n", r.n},
                  {"k", r.k},
                  {"r2", r.r2},
                  {"adj_r2", r.adj_r2},
                  {"f_stat", std::isfinite(r.f_stat) ? json(r.f_stat) : json()},
                  {"f_p_value", r.f_p_value},
                  {"rss", r.rss},
                  {"tss", r.tss},
                  {"sigma2", r.sigma2},
                  {"dropped_rows", r.dropped_rows},
                  {"intercept", r.has_intercept}};
    return doc.dump(2) + "\n";
}

std::string vif_csv(const VifReport& report, char delimiter) {
    std::ostringstream out;
    csv::write_row(out, {"term", "vif", "infinite"}, delimiter);
    for (const auto& e : report.entries)
        csv::write_row(out,
                       {e.name, e.infinite ? std::string() : csv::format_double(e.vif),
                        e.infinite ? "1" : "0"},
                       delimiter);
    return out.str();
}

std::string vif_json(const VifReport& report) {
    json arr = json::array();
    for (const auto& e : report.entries)
        arr.push_back(
            {{"term", e.name}, {"vif", e.infinite ? json() : json(e.vif)}, {"infinite", e.infinite}});
    return json{{"vif", arr}}.dump(2) + "\n";
}

std::string join_report_json(const JoinReport& report) {
    json unmatched = json::array();
    for (const auto& [province, info] : report.unmatched)
        unmatched.push_back(
            {{"province", province}, {"rows", info.first}, {"reason", info.second}});
    json doc{{"year", report.year},
             {"input_rows", report.input_rows},
             {"joined_rows", report.joined_rows},
             {"dropped_rows", report.dropped_rows},
             {"provinces_joined", report.provinces_joined},
             {"unmatched", unmatched}};
    return doc.dump(2) + "\n";
}

std::string ovb_json(const OvbComparison& cmp) {
    json deltas = json::array();
    for (const auto& d : coefficient_deltas(cmp))
        deltas.push_back({{"term", d.name},
                          {"base", d.base},
                          {"augmented", d.augmented},
                          {"delta", d.delta},
                          {"delta_in_base_se", d.delta_in_base_se}});
    json doc;
    doc["base"] = json::parse(regression_json(cmp.base));
    doc["augmented"] = json::parse(regression_json(cmp.augmented));
    doc["deltas"] = deltas;
    return doc.dump(2) + "\n";
}

std::string ovb_text(const OvbComparison& cmp, std::string_view title) {
    std::vector<RegressionResult> pair{cmp.base, cmp.augmented};
    pair[0].model_name = "base";
    pair[1].model_name = "with_extra";
    std::ostringstream out;
    out << coefficient_table_text(pair, title);
    out << "\nCoefficient movement (augmented - base):\n";
    for (const auto& d : coefficient_deltas(cmp)) {
        out << "  " << d.name << ": " << format_estimate(d.delta) << " ("
            << snprintf_str("%.2f", d.delta_in_base_se) << " base se)\n";
    }
    return out.str();
}

std::string parse_report_json(const ParseReport& report, std::string_view source) {
    auto issues = [](const std::vector<RowIssue>& v) {
        json arr = json::array();
        for (const auto& issue : v)
            arr.push_back({{"line", issue.line},
                           {"code", std::string(errc_name(issue.code))},
                           {"message", issue.message}});
        return arr;
    };
    json doc{{"source", std::string(source)},
             {"ok", report.ok()},
             {"errors", issues(report.errors)},
             {"warnings", issues(report.warnings)}};
    return doc.dump(2) + "\n";
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

} // namespace polarkit
