#pragma once

#include "polarkit/ingest.hpp"
#include "polarkit/regress.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace polarkit {

/// Coefficient formatting used in the text tables: fixed 4 decimals for
/// ordinary magnitudes, scientific otherwise (e.g. 4.51e-05).
std::string format_estimate(double v);
std::string format_se(double v);
std::string format_count(std::size_t n); // 14683 -> "14,683"

/// Aligned multi-model table: one column per fitted model, rows are
/// coefficients as "estimate*** (se)", footer rows Observations, R-squared,
/// Adjusted R-squared, F-statistic, then the stars legend and the baseline
/// note.
std::string coefficient_table_text(std::span<const RegressionResult> models,
                                   std::string_view title);

std::string vif_table_text(const VifReport& report, std::string_view title);

/// Machine outputs.
std::string regression_csv(const RegressionResult& result, char delimiter = ',');
std::string regression_json(const RegressionResult& result);
std::string vif_csv(const VifReport& report, char delimiter = ',');
std::string vif_json(const VifReport& report);
std::string join_report_json(const JoinReport& report);
std::string ovb_json(const OvbComparison& cmp);
std::string ovb_text(const OvbComparison& cmp, std::string_view title);
std::string parse_report_json(const ParseReport& report, std::string_view source);

/// FNV-1a 64-bit content hash, used to fingerprint inputs in the run
/// manifest (reproducibility bookkeeping, not cryptographic).
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

} // namespace polarkit
