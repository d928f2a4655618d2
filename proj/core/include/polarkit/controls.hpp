#pragma once

#include "polarkit/tables.hpp"

namespace polarkit {

/// Sectoral GDP shares. `sophistication` equals `industry` by construction:
/// both are (manufacturing + industry) / total.
struct SectorProportions {
    double agriculture = 0.0;
    double industry = 0.0;
    double services = 0.0; // services + finance/insurance
    double sophistication = 0.0;
};

/// Derives sector proportions from raw GDP components. Requires
/// total_gdp > 0 (ZeroTotalGdp otherwise) and rejects records whose listed
/// sectors exceed the total beyond rounding (ValueOutOfRange). Proportions
/// are not forced to exhaust the total; see sector_residual.
SectorProportions sector_proportions(const ControlRecord& rec);

/// Share of total GDP not covered by the three listed proportions.
double sector_residual(const SectorProportions& p);

} // namespace polarkit
