#pragma once

#include "polarkit/province.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polarkit {

/// Ideology weights for one party or candidate, both in [0,1].
struct PartyProfile {
    double religiosity = 0.0;
    double political = 0.0;
};

struct WeightTable {
    std::map<std::string, PartyProfile> rows; // keyed by party_id
};

/// Vote proportions for one province. Sums to 1 within 1e-9 after parsing
/// (under-complete rows are renormalized at ingest).
struct VoteShares {
    std::vector<std::pair<std::string, double>> shares; // (party_id, proportion)
};

struct ElectionTable {
    std::string election_id;
    std::map<std::string, VoteShares> rows; // keyed by canonical province name
};

/// One video-frame observation. A missing pair type means the frame contained
/// no such pair; it is never coded as zero.
struct DistanceRecord {
    std::string frame_id;
    std::string province; // canonical
    std::optional<double> nrp_vs_nrp;
    std::optional<double> rp_vs_rp;
    std::optional<double> nrp_vs_rp;
    int daynight = 0;  // 1 day, 0 night
    int is_summer = 0; // 1 warm months, 0 cold months
};

struct ControlRecord {
    std::string province; // canonical
    int year = 0;
    double num_mosques = 0.0;
    double gdp_per_capita = 0.0;
    double agriculture_gdp = 0.0;
    double manufacturing_gdp = 0.0;
    double industry_gdp = 0.0;
    double services_gdp = 0.0;
    double finance_gdp = 0.0;
    double total_gdp = 0.0;
    std::optional<double> poverty_rate;
};

/// Optional override of the built-in province->region table.
using RegionMap = std::map<std::string, Region>;

} // namespace polarkit
