#pragma once

#include "polarkit/data_table.hpp"
#include "polarkit/entropy.hpp"
#include "polarkit/error.hpp"
#include "polarkit/geometry.hpp"
#include "polarkit/tables.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace polarkit {

enum class Schema { elections, weights, distances, controls };

std::string_view schema_name(Schema s);

/// A rejected or suspicious input row.
struct RowIssue {
    std::size_t line = 0; // 1-based; header is line 1
    errc code = errc::value_out_of_range;
    std::string message;
};

struct ParseReport {
    std::vector<RowIssue> errors;   // rejected rows
    std::vector<RowIssue> warnings; // accepted with a note (e.g. renormalized shares)
    bool ok() const { return errors.empty(); }
};

template <typename T>
struct Parsed {
    T value;
    ParseReport report;
};

struct ParseOptions {
    char delimiter = ',';
    std::string election_id = "election";
};

/// Wide election table: `province,<party>,<party>,...`. Empty share cells are
/// zero. Rows whose raw share sum lies in [0.90, 1.0) are renormalized (the
/// shares are over valid votes) with a warning; sums outside that band and
/// not within 1e-9 of 1 reject the row. Unknown or repeated provinces reject
/// the row. Throws MalformedHeader for a structurally unusable file.
Parsed<ElectionTable> parse_elections(std::istream& in, const ParseOptions& opts = {});

/// `party_id,religiosity_degree,political_spectrum` (the short aliases
/// `religiosity` and `political` are accepted). Weights outside [0,1] reject
/// the row.
Parsed<WeightTable> parse_weights(std::istream& in, const ParseOptions& opts = {});

/// `frame_id,province,nrp_vs_nrp,rp_vs_rp,nrp_vs_rp,daynight,is_summer`
/// (header matching is case-insensitive). Empty distance cells are absent; a
/// row needs at least one of the three. When `is_summer` is missing but a
/// `publish_month` column exists, months 5-9 map to 1 — a toolkit
/// convention, flagged as a warning. Unknown provinces are kept (the join
/// reports them) with a warning.
Parsed<std::vector<DistanceRecord>> parse_distances(std::istream& in,
                                                    const ParseOptions& opts = {});

/// `province,year,num_mosques,gdp_per_capita,agriculture_gdp,
///  manufacturing_gdp,industry_gdp,services_gdp,finance_gdp,total_gdp,
///  poverty_rate`. `manufacturing_gdp` may be omitted (treated as 0 with the
/// industry column holding the combined sum); `poverty_rate` may be omitted.
Parsed<std::vector<ControlRecord>> parse_controls(std::istream& in,
                                                  const ParseOptions& opts = {});

/// Validation-only entry point for the CLI: parses under the given schema and
/// returns just the report.
ParseReport validate_stream(std::istream& in, Schema schema, const ParseOptions& opts = {});

/// Optional `province,region` override for the built-in region table.
Parsed<RegionMap> parse_regions(std::istream& in, const ParseOptions& opts = {});

/// `frame_id,cx,cy,bw,bh,cls` with optional `province,daynight,is_summer`
/// metadata columns (cls is NRP or RP, case-insensitive). Coordinates must
/// satisfy 0 <= cx,cy <= 1 and 0 < bw,bh <= 1.
Parsed<std::vector<DetectionRow>> parse_detections(std::istream& in,
                                                   const ParseOptions& opts = {});

struct JoinReport {
    std::size_t input_rows = 0;
    std::size_t joined_rows = 0;
    std::size_t dropped_rows = 0;
    std::size_t provinces_joined = 0;
    int year = 0;
    // canonical province -> (dropped row count, reason)
    std::map<std::string, std::pair<std::size_t, std::string>> unmatched;
};

/// Joins frame-level distance records with province-level entropies and
/// controls for the given year. One output row per joined DistanceRecord;
/// province-level values replicate across that province's frames. Unmatched
/// provinces are dropped and reported, never silently; joined + dropped
/// always equals the input count. Throws UnmatchedProvince when nothing
/// joins, and InvalidConfig when no controls exist for the year.
DataTable join_province(const ElectionTable& elections,
                        const std::map<std::string, EntropyMeasures>& entropies,
                        const std::vector<DistanceRecord>& distances,
                        const std::vector<ControlRecord>& controls, int year,
                        JoinReport& report, const RegionMap* region_override = nullptr);

/// Province-level aggregation (one row per province with distance data):
/// mean distances per pair type, frame count, entropies and controls.
DataTable province_level_table(const ElectionTable& elections,
                               const std::map<std::string, EntropyMeasures>& entropies,
                               const std::vector<DistanceRecord>& distances,
                               const std::vector<ControlRecord>& controls, int year,
                               JoinReport& report, const RegionMap* region_override = nullptr);

// Serializers; parse(serialize(parse(x))) == parse(x).
void write_elections(std::ostream& out, const ElectionTable& t, char delimiter = ',');
void write_weights(std::ostream& out, const WeightTable& t, char delimiter = ',');
void write_distances(std::ostream& out, const std::vector<DistanceRecord>& t,
                     char delimiter = ',');
void write_controls(std::ostream& out, const std::vector<ControlRecord>& t, char delimiter = ',');

} // namespace polarkit
