#include "polarkit/controls.hpp"

#include "polarkit/error.hpp"

namespace polarkit {

SectorProportions sector_proportions(const ControlRecord& rec) {
    if (!(rec.total_gdp > 0.0))
        throw Error(errc::zero_total_gdp, "province '" + rec.province + "' has total_gdp " +
                                              std::to_string(rec.total_gdp));
    SectorProportions p;
    p.agriculture = rec.agriculture_gdp / rec.total_gdp;
    p.industry = (rec.manufacturing_gdp + rec.industry_gdp) / rec.total_gdp;
    p.services = (rec.services_gdp + rec.finance_gdp) / rec.total_gdp;
    p.sophistication = p.industry;
    if (p.agriculture + p.industry + p.services > 1.0 + 1e-9)
        throw Error(errc::value_out_of_range,
                    "province '" + rec.province + "': sector GDP components exceed total_gdp");
    return p;
}

double sector_residual(const SectorProportions& p) {
    return 1.0 - (p.agriculture + p.industry + p.services);
}

} // namespace polarkit
