#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polarkit {

/// Six geographic strata used for the fixed effects, in dummy-encoding
/// level order.
enum class Region { central, east, marmara, south, southeast, west };

inline constexpr int kRegionCount = 6;

std::string_view region_name(Region r);
std::optional<Region> region_from_name(std::string_view name);

/// Lowercases, ASCII-folds the Turkish letters (dotless i, s-cedilla, soft g,
/// umlauts, c-cedilla, circumflexed vowels) and trims surrounding whitespace.
/// Idempotent: canonicalize(canonicalize(x)) == canonicalize(x).
std::string canonicalize_province(std::string_view raw);

struct ProvinceInfo {
    std::string_view name; // canonical form
    Region region;
};

/// The 81 provinces with their default region assignment, sorted by name.
/// The source regressions stratify into six regions but do not publish the
/// per-province mapping, so this table is a toolkit convention (the official
/// seven geographic regions collapsed to six; Black Sea provinces split
/// west/east of Ordu into central/east). It can be overridden per run with a
/// province,region file.
const std::vector<ProvinceInfo>& province_registry();

/// Region for a canonical province name, or nullopt for unknown names.
std::optional<Region> province_region(std::string_view canonical_name);

bool is_known_province(std::string_view canonical_name);

} // namespace polarkit
