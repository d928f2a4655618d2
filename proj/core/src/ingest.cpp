#include "polarkit/ingest.hpp"

#include "polarkit/controls.hpp"
#include "polarkit/csv.hpp"
#include "polarkit/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace polarkit {

namespace {

constexpr double kShareSumTolerance = 1e-9;
constexpr double kRenormalizeLow = 0.90;

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Case-insensitive header lookup; -1 if missing.
int find_header(const std::vector<std::string>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (lower(header[i]) == name) return static_cast<int>(i);
    return -1;
}

int require_header(const std::vector<std::string>& header, std::string_view name,
                   std::string_view schema) {
    int i = find_header(header, name);
    if (i < 0)
        throw Error(errc::malformed_header, std::string(schema) + " file is missing required column '" +
                                                std::string(name) + "'");
    return i;
}

std::string field_at(const csv::Row& row, int idx) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= row.fields.size()) return {};
    return csv::trim(row.fields[static_cast<std::size_t>(idx)]);
}

bool parse_field_double(const csv::Row& row, int idx, double& out) {
    return csv::parse_double(field_at(row, idx), out);
}

} // namespace

std::string_view schema_name(Schema s) {
    switch (s) {
    case Schema::elections: return "elections";
    case Schema::weights:   return "weights";
    case Schema::distances: return "distances";
    case Schema::controls:  return "controls";
    }
    return "?";
}

Parsed<ElectionTable> parse_elections(std::istream& in, const ParseOptions& opts) {
    csv::Document doc = csv::read(in, {opts.delimiter});
    const int prov_idx = require_header(doc.header, "province", "elections");
    std::vector<std::pair<int, std::string>> party_cols;
    for (std::size_t i = 0; i < doc.header.size(); ++i) {
        if (static_cast<int>(i) == prov_idx) continue;
        party_cols.emplace_back(static_cast<int>(i), csv::trim(doc.header[i]));
    }
    if (party_cols.empty())
        throw Error(errc::malformed_header, "elections file has no party columns");

    Parsed<ElectionTable> out;
    out.value.election_id = opts.election_id;
    for (const auto& row : doc.rows) {
        const std::string province = canonicalize_province(field_at(row, prov_idx));
        if (province.empty()) {
            out.report.errors.push_back({row.line, errc::value_out_of_range, "empty province name"});
            continue;
        }
        if (!is_known_province(province)) {
            out.report.errors.push_back(
                {row.line, errc::value_out_of_range, "unknown province '" + province + "'"});
            continue;
        }
        if (out.value.rows.count(province)) {
            out.report.errors.push_back(
                {row.line, errc::duplicate_key, "province '" + province + "' repeated"});
            continue;
        }

        VoteShares votes;
        bool row_ok = true;
        double sum = 0.0;
        for (const auto& [idx, party] : party_cols) {
            const std::string field = field_at(row, idx);
            double share = 0.0; // an empty cell means the party took no votes here
            if (!field.empty() && !csv::parse_double(field, share)) {
                out.report.errors.push_back({row.line, errc::value_out_of_range,
                                             "unparseable share '" + field + "' for party '" +
                                                 party + "'"});
                row_ok = false;
                break;
            }
            if (share < 0.0 || share > 1.0) {
                out.report.errors.push_back({row.line, errc::value_out_of_range,
                                             "share " + csv::format_double(share) + " for party '" +
                                                 party + "' outside [0,1]"});
                row_ok = false;
                break;
            }
            votes.shares.emplace_back(party, share);
            sum += share;
        }
        if (!row_ok) continue;

        if (std::abs(sum - 1.0) > kShareSumTolerance) {
            if (sum >= kRenormalizeLow && sum < 1.0) {
                for (auto& [party, share] : votes.shares) share /= sum;
                out.report.warnings.push_back(
                    {row.line, errc::value_out_of_range,
                     "province '" + province + "': shares summed to " + csv::format_double(sum) +
                         ", renormalized over valid votes"});
            } else {
                out.report.errors.push_back(
                    {row.line, errc::value_out_of_range,
                     "province '" + province + "': share sum " + csv::format_double(sum) +
                         " outside [0.90, 1.0) renormalization band"});
                continue;
            }
        }
        out.value.rows.emplace(province, std::move(votes));
    }
    return out;
}

Parsed<WeightTable> parse_weights(std::istream& in, const ParseOptions& opts) {
    csv::Document doc = csv::read(in, {opts.delimiter});
    const int party_idx = require_header(doc.header, "party_id", "weights");
    int r_idx = find_header(doc.header, "religiosity_degree");
    if (r_idx < 0) r_idx = require_header(doc.header, "religiosity", "weights");
    int s_idx = find_header(doc.header, "political_spectrum");
    if (s_idx < 0) s_idx = require_header(doc.header, "political", "weights");

    Parsed<WeightTable> out;
    for (const auto& row : doc.rows) {
        const std::string party = field_at(row, party_idx);
        if (party.empty()) {
            out.report.errors.push_back({row.line, errc::value_out_of_range, "empty party_id"});
            continue;
        }
        if (out.value.rows.count(party)) {
            out.report.errors.push_back(
                {row.line, errc::duplicate_key, "party '" + party + "' repeated"});
            continue;
        }
        PartyProfile profile;
        if (!parse_field_double(row, r_idx, profile.religiosity) ||
            !parse_field_double(row, s_idx, profile.political)) {
            out.report.errors.push_back(
                {row.line, errc::value_out_of_range, "party '" + party + "': unparseable weight"});
            continue;
        }
        if (profile.religiosity < 0.0 || profile.religiosity > 1.0 || profile.political < 0.0 ||
            profile.political > 1.0) {
            out.report.errors.push_back({row.line, errc::weight_out_of_range,
                                         "party '" + party + "': weights must lie in [0,1]"});
            continue;
        }
        out.value.rows.emplace(party, profile);
    }
    return out;
}

Parsed<std::vector<DistanceRecord>> parse_distances(std::istream& in, const ParseOptions& opts) {
    csv::Document doc = csv::read(in, {opts.delimiter});
    const int frame_idx = require_header(doc.header, "frame_id", "distances");
    const int prov_idx = require_header(doc.header, "province", "distances");
    const int nn_idx = require_header(doc.header, "nrp_vs_nrp", "distances");
    const int rr_idx = require_header(doc.header, "rp_vs_rp", "distances");
    const int nr_idx = require_header(doc.header, "nrp_vs_rp", "distances");
    const int day_idx = require_header(doc.header, "daynight", "distances");
    int summer_idx = find_header(doc.header, "is_summer");
    int month_idx = find_header(doc.header, "publish_month");
    if (summer_idx < 0 && month_idx < 0)
        throw Error(errc::malformed_header,
                    "distances file is missing required column 'is_summer' (or a "
                    "'publish_month' column to derive it from)");

    Parsed<std::vector<DistanceRecord>> out;
    if (summer_idx < 0)
        out.report.warnings.push_back(
            {1, errc::value_out_of_range,
             "is_summer derived from publish_month (months 5-9 -> 1); this is a toolkit "
             "convention, not part of the source data definition"});

    std::set<std::string> warned_provinces;
    for (const auto& row : doc.rows) {
        DistanceRecord rec;
        rec.frame_id = field_at(row, frame_idx);
        rec.province = canonicalize_province(field_at(row, prov_idx));
        if (rec.frame_id.empty() || rec.province.empty()) {
            out.report.errors.push_back(
                {row.line, errc::value_out_of_range, "empty frame_id or province"});
            continue;
        }
        if (!is_known_province(rec.province) && warned_provinces.insert(rec.province).second)
            out.report.warnings.push_back({row.line, errc::unmatched_province,
                                           "province '" + rec.province +
                                               "' is not in the canonical registry; rows will "
                                               "only join with a region override"});

        bool row_ok = true;
        auto read_distance = [&](int idx, const char* name) -> std::optional<double> {
            const std::string field = field_at(row, idx);
            if (field.empty()) return std::nullopt;
            double v = 0.0;
            if (!csv::parse_double(field, v) || v < 0.0) {
                out.report.errors.push_back({row.line, errc::value_out_of_range,
                                             std::string(name) + " '" + field +
                                                 "' is not a nonnegative real"});
                row_ok = false;
                return std::nullopt;
            }
            return v;
        };
        rec.nrp_vs_nrp = read_distance(nn_idx, "nrp_vs_nrp");
        rec.rp_vs_rp = read_distance(rr_idx, "rp_vs_rp");
        rec.nrp_vs_rp = read_distance(nr_idx, "nrp_vs_rp");
        if (!row_ok) continue;
        if (!rec.nrp_vs_nrp && !rec.rp_vs_rp && !rec.nrp_vs_rp) {
            out.report.errors.push_back({row.line, errc::value_out_of_range,
                                         "all three distance fields absent; at least one required"});
            continue;
        }

        auto read_binary = [&](int idx, const char* name, int& target) {
            double v = 0.0;
            if (!parse_field_double(row, idx, v) || (v != 0.0 && v != 1.0)) {
                out.report.errors.push_back({row.line, errc::value_out_of_range,
                                             std::string(name) + " must be 0 or 1"});
                row_ok = false;
                return;
            }
            target = static_cast<int>(v);
        };
        read_binary(day_idx, "daynight", rec.daynight);
        if (!row_ok) continue;
        if (summer_idx >= 0) {
            read_binary(summer_idx, "is_summer", rec.is_summer);
        } else {
            double month = 0.0;
            if (!parse_field_double(row, month_idx, month) || month < 1 || month > 12) {
                out.report.errors.push_back(
                    {row.line, errc::value_out_of_range, "publish_month must be in 1..12"});
                continue;
            }
            rec.is_summer = (month >= 5 && month <= 9) ? 1 : 0;
        }
        if (!row_ok) continue;
        out.value.push_back(std::move(rec));
    }
    return out;
}

Parsed<std::vector<ControlRecord>> parse_controls(std::istream& in, const ParseOptions& opts) {
    csv::Document doc = csv::read(in, {opts.delimiter});
    const int prov_idx = require_header(doc.header, "province", "controls");
    const int year_idx = require_header(doc.header, "year", "controls");
    const int mosque_idx = require_header(doc.header, "num_mosques", "controls");
    const int gdp_idx = require_header(doc.header, "gdp_per_capita", "controls");
    const int agri_idx = require_header(doc.header, "agriculture_gdp", "controls");
    const int mfg_idx = find_header(doc.header, "manufacturing_gdp"); // optional: may be folded
    const int ind_idx = require_header(doc.header, "industry_gdp", "controls");
    const int svc_idx = require_header(doc.header, "services_gdp", "controls");
    const int fin_idx = require_header(doc.header, "finance_gdp", "controls");
    const int tot_idx = require_header(doc.header, "total_gdp", "controls");
    const int pov_idx = find_header(doc.header, "poverty_rate"); // optional

    Parsed<std::vector<ControlRecord>> out;
    std::set<std::pair<std::string, int>> seen;
    for (const auto& row : doc.rows) {
        ControlRecord rec;
        rec.province = canonicalize_province(field_at(row, prov_idx));
        if (rec.province.empty() || !is_known_province(rec.province)) {
            out.report.errors.push_back({row.line, errc::value_out_of_range,
                                         "unknown province '" + rec.province + "'"});
            continue;
        }
        double year = 0.0;
        if (!parse_field_double(row, year_idx, year) || year != std::floor(year)) {
            out.report.errors.push_back({row.line, errc::value_out_of_range, "year must be an integer"});
            continue;
        }
        rec.year = static_cast<int>(year);
        if (!seen.insert({rec.province, rec.year}).second) {
            out.report.errors.push_back({row.line, errc::duplicate_key,
                                         "province '" + rec.province + "' repeated for year " +
                                             std::to_string(rec.year)});
            continue;
        }

        bool row_ok = true;
        auto read_nonneg = [&](int idx, const char* name, double& target, bool strict_pos = false) {
            if (!parse_field_double(row, idx, target) || target < 0.0 ||
                (strict_pos && target <= 0.0)) {
                out.report.errors.push_back(
                    {row.line, errc::value_out_of_range,
                     std::string(name) + std::string(strict_pos ? " must be > 0" : " must be >= 0")});
                row_ok = false;
            }
        };
        read_nonneg(mosque_idx, "num_mosques", rec.num_mosques);
        read_nonneg(gdp_idx, "gdp_per_capita", rec.gdp_per_capita, true);
        read_nonneg(agri_idx, "agriculture_gdp", rec.agriculture_gdp);
        if (mfg_idx >= 0)
            read_nonneg(mfg_idx, "manufacturing_gdp", rec.manufacturing_gdp);
        read_nonneg(ind_idx, "industry_gdp", rec.industry_gdp);
        read_nonneg(svc_idx, "services_gdp", rec.services_gdp);
        read_nonneg(fin_idx, "finance_gdp", rec.finance_gdp);
        read_nonneg(tot_idx, "total_gdp", rec.total_gdp, true);
        if (!row_ok) continue;

        const double sectors[] = {rec.agriculture_gdp, rec.manufacturing_gdp, rec.industry_gdp,
                                  rec.services_gdp, rec.finance_gdp};
        for (double s : sectors) {
            if (s > rec.total_gdp * (1.0 + 1e-9)) {
                out.report.errors.push_back({row.line, errc::value_out_of_range,
                                             "sector GDP exceeds total_gdp"});
                row_ok = false;
                break;
            }
        }
        if (row_ok) {
            double component_sum = 0.0;
            for (double s : sectors) component_sum += s;
            if (component_sum > rec.total_gdp * (1.0 + 1e-9)) {
                out.report.errors.push_back({row.line, errc::value_out_of_range,
                                             "sector GDP components sum beyond total_gdp"});
                row_ok = false;
            }
        }
        if (!row_ok) continue;

        if (pov_idx >= 0) {
            const std::string field = field_at(row, pov_idx);
            if (!field.empty()) {
                double v = 0.0;
                if (!csv::parse_double(field, v) || v < 0.0) {
                    out.report.errors.push_back(
                        {row.line, errc::value_out_of_range, "poverty_rate must be >= 0"});
                    continue;
                }
                rec.poverty_rate = v;
            }
        }
        out.value.push_back(std::move(rec));
    }
    return out;
}

Parsed<std::vector<DetectionRow>> parse_detections(std::istream& in, const ParseOptions& opts) {
    csv::Document doc = csv::read(in, {opts.delimiter});
    const int frame_idx = require_header(doc.header, "frame_id", "detections");
    const int cx_idx = require_header(doc.header, "cx", "detections");
    const int cy_idx = require_header(doc.header, "cy", "detections");
    const int bw_idx = require_header(doc.header, "bw", "detections");
    const int bh_idx = require_header(doc.header, "bh", "detections");
    const int cls_idx = require_header(doc.header, "cls", "detections");
    const int prov_idx = find_header(doc.header, "province");
    const int day_idx = find_header(doc.header, "daynight");
    const int summer_idx = find_header(doc.header, "is_summer");

    Parsed<std::vector<DetectionRow>> out;
    for (const auto& row : doc.rows) {
        DetectionRow rec;
        rec.frame_id = field_at(row, frame_idx);
        if (rec.frame_id.empty()) {
            out.report.errors.push_back({row.line, errc::value_out_of_range, "empty frame_id"});
            continue;
        }
        bool row_ok = true;
        auto coord = [&](int idx, const char* name, double& target, double lo) {
            if (!parse_field_double(row, idx, target) || target < lo || target > 1.0) {
                out.report.errors.push_back({row.line, errc::value_out_of_range,
                                             std::string(name) + " must lie in " +
                                                 (lo == 0.0 ? "[0,1]" : "(0,1]")});
                row_ok = false;
            }
        };
        coord(cx_idx, "cx", rec.det.cx, 0.0);
        coord(cy_idx, "cy", rec.det.cy, 0.0);
        coord(bw_idx, "bw", rec.det.bw, 0.0);
        coord(bh_idx, "bh", rec.det.bh, 0.0);
        if (row_ok && (rec.det.bw <= 0.0 || rec.det.bh <= 0.0)) {
            out.report.errors.push_back(
                {row.line, errc::value_out_of_range, "bw and bh must be positive"});
            row_ok = false;
        }
        const std::string cls = lower(field_at(row, cls_idx));
        if (cls == "nrp")
            rec.det.cls = PedestrianClass::nrp;
        else if (cls == "rp")
            rec.det.cls = PedestrianClass::rp;
        else {
            out.report.errors.push_back(
                {row.line, errc::value_out_of_range, "cls must be NRP or RP, got '" + cls + "'"});
            row_ok = false;
        }
        if (!row_ok) continue;

        if (prov_idx >= 0) rec.province = canonicalize_province(field_at(row, prov_idx));
        auto optional_binary = [&](int idx, const char* name) -> std::optional<int> {
            if (idx < 0) return std::nullopt;
            const std::string field = field_at(row, idx);
            if (field.empty()) return std::nullopt;
            double v = 0.0;
            if (!csv::parse_double(field, v) || (v != 0.0 && v != 1.0)) {
                out.report.errors.push_back(
                    {row.line, errc::value_out_of_range, std::string(name) + " must be 0 or 1"});
                row_ok = false;
                return std::nullopt;
            }
            return static_cast<int>(v);
        };
        rec.daynight = optional_binary(day_idx, "daynight");
        rec.is_summer = optional_binary(summer_idx, "is_summer");
        if (!row_ok) continue;
        out.value.push_back(std::move(rec));
    }
    return out;
}

ParseReport validate_stream(std::istream& in, Schema schema, const ParseOptions& opts) {
    switch (schema) {
    case Schema::elections: return parse_elections(in, opts).report;
    case Schema::weights:   return parse_weights(in, opts).report;
    case Schema::distances: return parse_distances(in, opts).report;
    case Schema::controls:  return parse_controls(in, opts).report;
    }
    throw Error(errc::invalid_config, "unknown schema");
}

Parsed<RegionMap> parse_regions(std::istream& in, const ParseOptions& opts) {
    csv::Document doc = csv::read(in, {opts.delimiter});
    const int prov_idx = require_header(doc.header, "province", "regions");
    const int region_idx = require_header(doc.header, "region", "regions");
    Parsed<RegionMap> out;
    for (const auto& row : doc.rows) {
        const std::string province = canonicalize_province(field_at(row, prov_idx));
        const auto region = region_from_name(lower(field_at(row, region_idx)));
        if (province.empty() || !region) {
            out.report.errors.push_back({row.line, errc::value_out_of_range,
                                         "expected province,region with region one of "
                                         "central/east/marmara/south/southeast/west"});
            continue;
        }
        out.value[province] = *region;
    }
    return out;
}

namespace {

std::optional<Region> resolve_region(const std::string& province, const RegionMap* override_map) {
    if (override_map) {
        auto it = override_map->find(province);
        if (it != override_map->end()) return it->second;
    }
    return province_region(province);
}

struct ProvinceSlice {
    const EntropyMeasures* entropy = nullptr;
    const ControlRecord* control = nullptr;
    SectorProportions proportions;
    Region region = Region::central;
};

// Province-level pieces needed by both join granularities. Returns nullopt
// with a reason string when the province cannot join.
std::map<std::string, ProvinceSlice>
build_slices(const std::map<std::string, EntropyMeasures>& entropies,
             const std::vector<ControlRecord>& controls, int year,
             const RegionMap* region_override) {
    std::map<std::string, const ControlRecord*> controls_by_province;
    for (const auto& rec : controls)
        if (rec.year == year) controls_by_province[rec.province] = &rec;
    if (controls_by_province.empty())
        throw Error(errc::invalid_config,
                    "no control records for year " + std::to_string(year));

    std::map<std::string, ProvinceSlice> slices;
    for (const auto& [province, measures] : entropies) {
        auto cit = controls_by_province.find(province);
        if (cit == controls_by_province.end()) continue;
        auto region = resolve_region(province, region_override);
        if (!region) continue;
        ProvinceSlice slice;
        slice.entropy = &measures;
        slice.control = cit->second;
        slice.proportions = sector_proportions(*cit->second);
        slice.region = *region;
        slices.emplace(province, slice);
    }
    return slices;
}

std::string join_failure_reason(const std::string& province,
                                const std::map<std::string, EntropyMeasures>& entropies,
                                const std::vector<ControlRecord>& controls, int year,
                                const RegionMap* region_override) {
    if (!entropies.count(province)) return "no election/entropy row";
    bool has_control = false;
    for (const auto& rec : controls)
        if (rec.year == year && rec.province == province) has_control = true;
    if (!has_control) return "no control row for year " + std::to_string(year);
    if (!resolve_region(province, region_override)) return "no region assignment";
    return "unjoinable";
}

} // namespace

DataTable join_province(const ElectionTable& elections,
                        const std::map<std::string, EntropyMeasures>& entropies,
                        const std::vector<DistanceRecord>& distances,
                        const std::vector<ControlRecord>& controls, int year,
                        JoinReport& report, const RegionMap* region_override) {
    (void)elections; // provinces are keyed through the entropy map
    auto slices = build_slices(entropies, controls, year, region_override);

    report = JoinReport{};
    report.year = year;
    report.input_rows = distances.size();

    DataTable t;
    t.add_text("frame_id");
    t.add_text("province");
    t.add_text("region");
    for (const char* name : {"nrp_vs_nrp", "rp_vs_rp", "nrp_vs_rp", "daynight", "is_summer",
                             "h_unweighted", "h_religiosity", "h_political", "num_mosques",
                             "gdp_per_capita", "agriculture_prop", "industry_prop",
                             "services_prop", "economic_sophistication_proxy", "poverty_rate",
                             "year"})
        t.add_numeric(name);
    auto& frame_col = t.text("frame_id");
    auto& prov_col = t.text("province");
    auto& region_col = t.text("region");
    auto& nn = t.num("nrp_vs_nrp");
    auto& rr = t.num("rp_vs_rp");
    auto& nr = t.num("nrp_vs_rp");
    auto& day = t.num("daynight");
    auto& summer = t.num("is_summer");
    auto& hu = t.num("h_unweighted");
    auto& hr = t.num("h_religiosity");
    auto& hp = t.num("h_political");
    auto& mosques = t.num("num_mosques");
    auto& gdp = t.num("gdp_per_capita");
    auto& agri = t.num("agriculture_prop");
    auto& ind = t.num("industry_prop");
    auto& svc = t.num("services_prop");
    auto& soph = t.num("economic_sophistication_proxy");
    auto& pov = t.num("poverty_rate");
    auto& year_col = t.num("year");

    std::set<std::string> joined_provinces;
    for (const auto& rec : distances) {
        auto it = slices.find(rec.province);
        if (it == slices.end()) {
            auto& entry = report.unmatched[rec.province];
            if (entry.first == 0)
                entry.second =
                    join_failure_reason(rec.province, entropies, controls, year, region_override);
            ++entry.first;
            ++report.dropped_rows;
            continue;
        }
        const ProvinceSlice& s = it->second;
        frame_col.push_back(rec.frame_id);
        prov_col.push_back(rec.province);
        region_col.push_back(std::string(region_name(s.region)));
        nn.push_back(rec.nrp_vs_nrp.value_or(absent()));
        rr.push_back(rec.rp_vs_rp.value_or(absent()));
        nr.push_back(rec.nrp_vs_rp.value_or(absent()));
        day.push_back(rec.daynight);
        summer.push_back(rec.is_summer);
        hu.push_back(s.entropy->h_unweighted);
        hr.push_back(s.entropy->h_religiosity);
        hp.push_back(s.entropy->h_political);
        mosques.push_back(s.control->num_mosques);
        gdp.push_back(s.control->gdp_per_capita);
        agri.push_back(s.proportions.agriculture);
        ind.push_back(s.proportions.industry);
        svc.push_back(s.proportions.services);
        soph.push_back(s.proportions.sophistication);
        pov.push_back(s.control->poverty_rate.value_or(absent()));
        year_col.push_back(year);
        joined_provinces.insert(rec.province);
        ++report.joined_rows;
    }
    report.provinces_joined = joined_provinces.size();

    if (report.joined_rows == 0 && report.input_rows > 0)
        throw Error(errc::unmatched_province,
                    "all " + std::to_string(report.input_rows) + " distance records failed to join");
    return t;
}

DataTable province_level_table(const ElectionTable& elections,
                               const std::map<std::string, EntropyMeasures>& entropies,
                               const std::vector<DistanceRecord>& distances,
                               const std::vector<ControlRecord>& controls, int year,
                               JoinReport& report, const RegionMap* region_override) {
    (void)elections;
    auto slices = build_slices(entropies, controls, year, region_override);
    auto means = province_mean_distances(distances);

    report = JoinReport{};
    report.year = year;
    report.input_rows = distances.size();

    std::map<std::string, std::size_t> frames_per_province;
    for (const auto& rec : distances) ++frames_per_province[rec.province];

    DataTable t;
    t.add_text("province");
    t.add_text("region");
    for (const char* name : {"n_frames", "nrp_vs_nrp", "rp_vs_rp", "nrp_vs_rp", "h_unweighted",
                             "h_religiosity", "h_political", "num_mosques", "gdp_per_capita",
                             "economic_sophistication_proxy", "poverty_rate"})
        t.add_numeric(name);
    auto& prov_col = t.text("province");
    auto& region_col = t.text("region");
    auto& frames = t.num("n_frames");
    auto& nn = t.num("nrp_vs_nrp");
    auto& rr = t.num("rp_vs_rp");
    auto& nr = t.num("nrp_vs_rp");
    auto& hu = t.num("h_unweighted");
    auto& hr = t.num("h_religiosity");
    auto& hp = t.num("h_political");
    auto& mosques = t.num("num_mosques");
    auto& gdp = t.num("gdp_per_capita");
    auto& soph = t.num("economic_sophistication_proxy");
    auto& pov = t.num("poverty_rate");

    for (const auto& [province, mean] : means) {
        auto it = slices.find(province);
        const std::size_t rows = frames_per_province[province];
        if (it == slices.end()) {
            report.unmatched[province] = {
                rows, join_failure_reason(province, entropies, controls, year, region_override)};
            report.dropped_rows += rows;
            continue;
        }
        const ProvinceSlice& s = it->second;
        prov_col.push_back(province);
        region_col.push_back(std::string(region_name(s.region)));
        frames.push_back(static_cast<double>(rows));
        nn.push_back(mean.nrp_vs_nrp.value_or(absent()));
        rr.push_back(mean.rp_vs_rp.value_or(absent()));
        nr.push_back(mean.nrp_vs_rp.value_or(absent()));
        hu.push_back(s.entropy->h_unweighted);
        hr.push_back(s.entropy->h_religiosity);
        hp.push_back(s.entropy->h_political);
        mosques.push_back(s.control->num_mosques);
        gdp.push_back(s.control->gdp_per_capita);
        soph.push_back(s.proportions.sophistication);
        pov.push_back(s.control->poverty_rate.value_or(absent()));
        report.joined_rows += rows;
    }
    report.provinces_joined = prov_col.size();

    if (report.joined_rows == 0 && report.input_rows > 0)
        throw Error(errc::unmatched_province, "no province joined at province level");
    return t;
}

void write_elections(std::ostream& out, const ElectionTable& t, char delimiter) {
    std::set<std::string> parties;
    for (const auto& [province, votes] : t.rows)
        for (const auto& [party, share] : votes.shares) parties.insert(party);

    std::vector<std::string> header{"province"};
    header.insert(header.end(), parties.begin(), parties.end());
    csv::write_row(out, header, delimiter);

    for (const auto& [province, votes] : t.rows) {
        std::map<std::string, double> by_party;
        for (const auto& [party, share] : votes.shares) by_party[party] = share;
        std::vector<std::string> fields{province};
        for (const auto& party : parties) {
            auto it = by_party.find(party);
            fields.push_back(csv::format_double(it == by_party.end() ? 0.0 : it->second));
        }
        csv::write_row(out, fields, delimiter);
    }
}

void write_weights(std::ostream& out, const WeightTable& t, char delimiter) {
    csv::write_row(out, {"party_id", "religiosity_degree", "political_spectrum"}, delimiter);
    for (const auto& [party, profile] : t.rows)
        csv::write_row(out,
                       {party, csv::format_double(profile.religiosity),
                        csv::format_double(profile.political)},
                       delimiter);
}

void write_distances(std::ostream& out, const std::vector<DistanceRecord>& t, char delimiter) {
    csv::write_row(
        out, {"frame_id", "province", "nrp_vs_nrp", "rp_vs_rp", "nrp_vs_rp", "daynight", "is_summer"},
        delimiter);
    auto cell = [](const std::optional<double>& v) {
        return v ? csv::format_double(*v) : std::string();
    };
    for (const auto& rec : t)
        csv::write_row(out,
                       {rec.frame_id, rec.province, cell(rec.nrp_vs_nrp), cell(rec.rp_vs_rp),
                        cell(rec.nrp_vs_rp), std::to_string(rec.daynight),
                        std::to_string(rec.is_summer)},
                       delimiter);
}

void write_controls(std::ostream& out, const std::vector<ControlRecord>& t, char delimiter) {
    csv::write_row(out,
                   {"province", "year", "num_mosques", "gdp_per_capita", "agriculture_gdp",
                    "manufacturing_gdp", "industry_gdp", "services_gdp", "finance_gdp", "total_gdp",
                    "poverty_rate"},
                   delimiter);
    for (const auto& rec : t)
        csv::write_row(out,
                       {rec.province, std::to_string(rec.year), csv::format_double(rec.num_mosques),
                        csv::format_double(rec.gdp_per_capita),
                        csv::format_double(rec.agriculture_gdp),
                        csv::format_double(rec.manufacturing_gdp),
                        csv::format_double(rec.industry_gdp), csv::format_double(rec.services_gdp),
                        csv::format_double(rec.finance_gdp), csv::format_double(rec.total_gdp),
                        rec.poverty_rate ? csv::format_double(*rec.poverty_rate) : std::string()},
                       delimiter);
}

} // namespace polarkit
