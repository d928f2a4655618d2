#include "polarkit/synth.hpp"

#include "polarkit/csv.hpp"
#include "polarkit/entropy.hpp"
#include "polarkit/error.hpp"
#include "polarkit/rng.hpp"
#include "polarkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace polarkit {

namespace {

constexpr std::uint64_t kProvinceStreamBase = 0;
constexpr std::uint64_t kFrameStreamBase = 100000;
constexpr std::uint64_t kNoiseStreamBase = 200000;
constexpr std::uint64_t kWeightStream = 777;

// Deterministic province pick: cycle the six regions in level order, taking
// provinces alphabetically within each, so every region is represented for
// n >= 6.
std::vector<ProvinceInfo> select_provinces(int n) {
    std::vector<std::vector<ProvinceInfo>> by_region(kRegionCount);
    for (const auto& p : province_registry())
        by_region[static_cast<int>(p.region)].push_back(p);

    std::vector<ProvinceInfo> out;
    std::vector<std::size_t> cursor(kRegionCount, 0);
    int region = 0;
    while (static_cast<int>(out.size()) < n) {
        int tried = 0;
        while (cursor[region] >= by_region[region].size() && tried < kRegionCount) {
            region = (region + 1) % kRegionCount;
            ++tried;
        }
        if (tried == kRegionCount) break; // all 81 consumed
        out.push_back(by_region[region][cursor[region]++]);
        region = (region + 1) % kRegionCount;
    }
    return out;
}

void validate_config(const SynthConfig& cfg) {
    auto fail = [](const std::string& msg) { throw Error(errc::invalid_config, msg); };
    if (cfg.n_provinces < 6 || cfg.n_provinces > 81)
        fail("n_provinces must be in [6, 81] so every region level appears");
    if (cfg.frames_per_province < 1) fail("frames_per_province must be >= 1");
    if (!(cfg.noise_sd >= 0.0)) fail("noise_sd must be >= 0");
    if (cfg.n_parties < 2) fail("n_parties must be >= 2");
    if (!(std::abs(cfg.distance_corr) < 1.0)) fail("distance_corr must lie in (-1, 1)");
    const Range ranges[] = {cfg.nrp_vs_rp_range,  cfg.nrp_vs_nrp_range, cfg.rp_vs_rp_range,
                            cfg.mosques_range,    cfg.gdp_range,        cfg.sophistication_range,
                            cfg.poverty_range};
    for (const auto& r : ranges)
        if (!(r.lo <= r.hi) || r.lo < 0.0) fail("ranges must satisfy 0 <= lo <= hi");
    if (cfg.outcome != "h_unweighted" && cfg.outcome != "h_religiosity" &&
        cfg.outcome != "h_political")
        fail("outcome must be one of the three entropy columns");
    if (!cfg.true_beta.empty() &&
        cfg.true_beta.size() != SynthConfig::coefficient_names().size())
        fail("true_beta must have " + std::to_string(SynthConfig::coefficient_names().size()) +
             " entries (see coefficient_names())");
}

std::vector<double> effective_beta(const SynthConfig& cfg) {
    return cfg.true_beta.empty() ? SynthConfig::default_beta() : cfg.true_beta;
}

// Design-row inner product in coefficient_names() order.
double planted_mean(const std::vector<double>& beta, double nrp_rp, double nrp_nrp, double mosques,
                    double gdp, double soph, double daynight, double summer, Region region) {
    double y = beta[0];
    y += beta[1] * nrp_rp;
    y += beta[2] * nrp_nrp;
    y += beta[3] * mosques;
    y += beta[4] * gdp;
    y += beta[5] * soph;
    y += beta[6] * daynight;
    y += beta[7] * summer;
    switch (region) {
    case Region::central: break; // baseline
    case Region::east:      y += beta[8]; break;
    case Region::marmara:   y += beta[9]; break;
    case Region::south:     y += beta[10]; break;
    case Region::southeast: y += beta[11]; break;
    case Region::west:      y += beta[12]; break;
    }
    return y;
}

struct ProvinceDraw {
    ProvinceInfo info;
    double mosques = 0.0;
    double gdp = 0.0;
    double soph = 0.0;
    double agri_prop = 0.0;
    double svc_prop = 0.0;
    double poverty = 0.0;
    double total_gdp = 0.0;
};

ProvinceDraw draw_province(const SynthConfig& cfg, SplitMix64 master, std::size_t index,
                           const ProvinceInfo& info) {
    SplitMix64 rng = master.substream(kProvinceStreamBase + index);
    ProvinceDraw d;
    d.info = info;
    d.mosques = std::round(rng.next_uniform(cfg.mosques_range.lo, cfg.mosques_range.hi));
    d.gdp = rng.next_uniform(cfg.gdp_range.lo, cfg.gdp_range.hi);
    d.soph = rng.next_uniform(cfg.sophistication_range.lo, cfg.sophistication_range.hi);
    d.agri_prop = rng.next_uniform(0.0, 0.6 * (1.0 - d.soph));
    d.svc_prop = rng.next_uniform(0.0, 0.8 * (1.0 - d.soph - d.agri_prop));
    d.total_gdp = rng.next_uniform(1e9, 1e10);

    const double u = rng.next_normal();
    if (cfg.poverty_gdp_corr != 0.0) {
        // Couple poverty to gdp on the normal scale, then map into range.
        const double gdp_z =
            (d.gdp - 0.5 * (cfg.gdp_range.lo + cfg.gdp_range.hi)) /
            (cfg.gdp_range.hi > cfg.gdp_range.lo ? (cfg.gdp_range.hi - cfg.gdp_range.lo) / 3.4641
                                                 : 1.0);
        const double rho = cfg.poverty_gdp_corr;
        const double z = rho * gdp_z + std::sqrt(1.0 - rho * rho) * u;
        const double mid = 0.5 * (cfg.poverty_range.lo + cfg.poverty_range.hi);
        const double spread = (cfg.poverty_range.hi - cfg.poverty_range.lo) / 6.0;
        d.poverty = std::max(0.0, mid + spread * z);
    } else {
        d.poverty = rng.next_uniform(cfg.poverty_range.lo, cfg.poverty_range.hi);
    }
    return d;
}

} // namespace

std::vector<std::string> SynthConfig::coefficient_names() {
    return {"const",
            "nrp_vs_rp",
            "nrp_vs_nrp",
            "num_mosques",
            "gdp_per_capita",
            "economic_sophistication_proxy",
            "daynight",
            "is_summer",
            "region:east",
            "region:marmara",
            "region:south",
            "region:southeast",
            "region:west"};
}

std::vector<double> SynthConfig::default_beta() {
    return {1.2,     0.08,  -0.05, 4.0e-5, 3.0e-6, -0.8, -0.01,
            -0.02,   0.09,  0.15,  0.25,   0.05,   0.10};
}

ModelSpec synth_model_spec(const SynthConfig& cfg) {
    ModelSpec spec;
    spec.name = "synthetic_" + std::to_string(cfg.year);
    spec.outcome = cfg.outcome;
    spec.regressors = {"nrp_vs_rp",     "nrp_vs_nrp", "num_mosques", "gdp_per_capita",
                       "economic_sophistication_proxy", "daynight",   "is_summer"};
    if (cfg.duplicate_regressor_fault) spec.regressors.push_back("gdp_per_capita");
    spec.categoricals = {{"region", "central"}};
    spec.include_intercept = true;
    return spec;
}

SynthTable generate(const SynthConfig& cfg) {
    validate_config(cfg);
    const auto beta = effective_beta(cfg);
    const auto provinces = select_provinces(cfg.n_provinces);
    SplitMix64 master(cfg.rng_seed);

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

    for (std::size_t p = 0; p < provinces.size(); ++p) {
        const ProvinceDraw d = draw_province(cfg, master, p, provinces[p]);
        SplitMix64 frame_rng = master.substream(kFrameStreamBase + p);
        SplitMix64 noise_rng = master.substream(kNoiseStreamBase + p);

        for (int f = 0; f < cfg.frames_per_province; ++f) {
            double dist_nr, dist_nn;
            if (cfg.distance_corr != 0.0) {
                // Correlated pair on the normal scale; sds keep draws
                // comfortably positive.
                const double z1 = frame_rng.next_normal();
                const double z2 = frame_rng.next_normal();
                const double rho = cfg.distance_corr;
                const double z2c = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
                auto map_range = [](const Range& r, double z) {
                    const double mid = 0.5 * (r.lo + r.hi);
                    const double spread = (r.hi - r.lo) / 8.0;
                    return std::max(0.0, mid + spread * z);
                };
                dist_nr = map_range(cfg.nrp_vs_rp_range, z1);
                dist_nn = map_range(cfg.nrp_vs_nrp_range, z2c);
            } else {
                dist_nr = frame_rng.next_uniform(cfg.nrp_vs_rp_range.lo, cfg.nrp_vs_rp_range.hi);
                dist_nn = frame_rng.next_uniform(cfg.nrp_vs_nrp_range.lo, cfg.nrp_vs_nrp_range.hi);
            }
            const double dist_rr =
                frame_rng.next_uniform(cfg.rp_vs_rp_range.lo, cfg.rp_vs_rp_range.hi);
            const double daynight = frame_rng.next_double() < 0.5 ? 0.0 : 1.0;
            const double is_summer = frame_rng.next_double() < 0.5 ? 0.0 : 1.0;

            double y = planted_mean(beta, dist_nr, dist_nn, d.mosques, d.gdp, d.soph, daynight,
                                    is_summer, d.info.region);
            y += cfg.poverty_effect * d.poverty;
            y += cfg.noise_sd * noise_rng.next_normal();

            frame_col.push_back(std::string(d.info.name) + "_f" + std::to_string(f));
            prov_col.push_back(std::string(d.info.name));
            region_col.push_back(std::string(region_name(d.info.region)));
            nn.push_back(dist_nn);
            rr.push_back(dist_rr);
            nr.push_back(dist_nr);
            day.push_back(daynight);
            summer.push_back(is_summer);
            hu.push_back(cfg.outcome == "h_unweighted" ? y : absent());
            hr.push_back(cfg.outcome == "h_religiosity" ? y : absent());
            hp.push_back(cfg.outcome == "h_political" ? y : absent());
            mosques.push_back(d.mosques);
            gdp.push_back(d.gdp);
            agri.push_back(d.agri_prop);
            ind.push_back(d.soph);
            svc.push_back(d.svc_prop);
            soph.push_back(d.soph);
            pov.push_back(d.poverty);
            year_col.push_back(cfg.year);
        }
    }

    SynthTable out;
    out.table = std::move(t);
    out.coefficient_names = SynthConfig::coefficient_names();
    out.true_beta = beta;
    out.model = synth_model_spec(cfg);
    return out;
}

std::vector<double> shares_for_entropy(double target, int n_parties) {
    if (n_parties < 1) throw Error(errc::invalid_config, "n_parties must be >= 1");
    const double max_h = std::log(static_cast<double>(n_parties));
    if (!(target >= 0.0 && target <= max_h + 1e-12))
        throw Error(errc::invalid_config,
                    "entropy target " + std::to_string(target) + " outside [0, ln " +
                        std::to_string(n_parties) + "]");

    auto tilted = [&](double t) {
        std::vector<double> p(static_cast<std::size_t>(n_parties));
        double z = 0.0;
        for (int i = 0; i < n_parties; ++i) {
            p[static_cast<std::size_t>(i)] = std::exp(-t * i);
            z += p[static_cast<std::size_t>(i)];
        }
        for (auto& v : p) v /= z;
        return p;
    };
    auto entropy_of = [](const std::vector<double>& p) {
        double h = 0.0;
        for (double v : p)
            if (v > 0.0) h -= v * std::log(v);
        return h;
    };

    if (target >= max_h - 1e-13) return tilted(0.0);
    if (target <= 1e-13) {
        std::vector<double> p(static_cast<std::size_t>(n_parties), 0.0);
        p[0] = 1.0;
        return p;
    }

    // H(t) decreases monotonically from ln n at t=0 toward 0; bisect.
    double lo = 0.0, hi = 1.0;
    while (entropy_of(tilted(hi)) > target) {
        hi *= 2.0;
        if (hi > 1e8)
            throw Error(errc::invalid_config, "entropy target too close to zero to invert");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (entropy_of(tilted(mid)) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-16 * (1.0 + hi)) break;
    }
    return tilted(0.5 * (lo + hi));
}

SynthBundle generate_bundle(const SynthConfig& cfg) {
    validate_config(cfg);
    const auto beta = effective_beta(cfg);
    const auto provinces = select_provinces(cfg.n_provinces);
    SplitMix64 master(cfg.rng_seed);
    const double max_h = std::log(static_cast<double>(cfg.n_parties));

    SynthBundle bundle;
    bundle.coefficient_names = SynthConfig::coefficient_names();
    bundle.true_beta = beta;
    bundle.model = synth_model_spec(cfg);
    bundle.elections.election_id = "synthetic_" + std::to_string(cfg.year);

    // Party ideology weights.
    SplitMix64 weight_rng = master.substream(kWeightStream);
    std::vector<std::string> party_ids;
    for (int i = 0; i < cfg.n_parties; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "party_%02d", i + 1);
        party_ids.emplace_back(buf);
        PartyProfile profile;
        profile.religiosity = weight_rng.next_uniform(0.05, 0.95);
        profile.political = weight_rng.next_uniform(0.05, 0.95);
        bundle.weights.rows.emplace(party_ids.back(), profile);
    }

    for (std::size_t p = 0; p < provinces.size(); ++p) {
        const ProvinceDraw d = draw_province(cfg, master, p, provinces[p]);
        SplitMix64 frame_rng = master.substream(kFrameStreamBase + p);
        SplitMix64 noise_rng = master.substream(kNoiseStreamBase + p);

        // Province-constant regressors: the planted outcome lives at province
        // level (it is an entropy), so within-province regressor variation
        // would decouple it from the design.
        const double dist_nr =
            frame_rng.next_uniform(cfg.nrp_vs_rp_range.lo, cfg.nrp_vs_rp_range.hi);
        const double dist_nn =
            frame_rng.next_uniform(cfg.nrp_vs_nrp_range.lo, cfg.nrp_vs_nrp_range.hi);
        const double dist_rr =
            frame_rng.next_uniform(cfg.rp_vs_rp_range.lo, cfg.rp_vs_rp_range.hi);
        // Random per-province binaries: index-based alternation would be
        // perfectly collinear with the round-robin region assignment.
        const int daynight = frame_rng.next_double() < 0.5 ? 1 : 0;
        const int is_summer = frame_rng.next_double() < 0.5 ? 1 : 0;

        double target = planted_mean(beta, dist_nr, dist_nn, d.mosques, d.gdp, d.soph, daynight,
                                     is_summer, d.info.region);
        target += cfg.poverty_effect * d.poverty;
        target += cfg.noise_sd * noise_rng.next_normal();
        if (!(target > 0.02 && target < max_h - 0.02))
            throw Error(errc::invalid_config,
                        "planted entropy target " + std::to_string(target) + " for province '" +
                            std::string(d.info.name) + "' leaves (0, ln n_parties); shrink "
                            "true_beta/noise_sd or raise n_parties");

        const auto shares = shares_for_entropy(target, cfg.n_parties);
        VoteShares votes;
        for (int i = 0; i < cfg.n_parties; ++i)
            votes.shares.emplace_back(party_ids[static_cast<std::size_t>(i)],
                                      shares[static_cast<std::size_t>(i)]);
        bundle.elections.rows.emplace(std::string(d.info.name), std::move(votes));

        ControlRecord control;
        control.province = std::string(d.info.name);
        control.year = cfg.year;
        control.num_mosques = d.mosques;
        control.gdp_per_capita = d.gdp;
        control.total_gdp = d.total_gdp;
        control.manufacturing_gdp = 0.6 * d.soph * d.total_gdp;
        control.industry_gdp = 0.4 * d.soph * d.total_gdp;
        control.agriculture_gdp = d.agri_prop * d.total_gdp;
        control.services_gdp = 0.8 * d.svc_prop * d.total_gdp;
        control.finance_gdp = 0.2 * d.svc_prop * d.total_gdp;
        control.poverty_rate = d.poverty;
        bundle.controls.push_back(std::move(control));

        for (int f = 0; f < cfg.frames_per_province; ++f) {
            DistanceRecord rec;
            rec.frame_id = std::string(d.info.name) + "_f" + std::to_string(f);
            rec.province = std::string(d.info.name);
            rec.nrp_vs_nrp = dist_nn;
            rec.rp_vs_rp = dist_rr;
            rec.nrp_vs_rp = dist_nr;
            rec.daynight = daynight;
            rec.is_summer = is_summer;
            bundle.distances.push_back(std::move(rec));
        }
    }
    return bundle;
}

void write_bundle(const SynthBundle& bundle, const std::filesystem::path& dir, char delimiter) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw Error(errc::io_error, "cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("elections.csv");
        write_elections(out, bundle.elections, delimiter);
    }
    {
        auto out = open("weights.csv");
        write_weights(out, bundle.weights, delimiter);
    }
    {
        auto out = open("distances.csv");
        write_distances(out, bundle.distances, delimiter);
    }
    {
        auto out = open("controls.csv");
        write_controls(out, bundle.controls, delimiter);
    }
    {
        auto out = open("true_coefficients.csv");
        csv::write_row(out, {"term", "true_value"}, delimiter);
        for (std::size_t i = 0; i < bundle.coefficient_names.size(); ++i)
            csv::write_row(out,
                           {bundle.coefficient_names[i], csv::format_double(bundle.true_beta[i])},
                           delimiter);
    }
}

RecoveryReport recovery_check(const SynthConfig& cfg) {
    RecoveryReport report;
    SynthBundle bundle = generate_bundle(cfg);
    const auto entropies = province_entropies(bundle.elections, bundle.weights);
    DataTable table = join_province(bundle.elections, entropies, bundle.distances, bundle.controls,
                                    cfg.year, report.join);

    RegressionResult fit;
    DesignMatrix design;
    try {
        design = build_design(table, bundle.model);
        fit = ols_fit(design);
    } catch (const Error& e) {
        if (e.code() == errc::rank_deficient && cfg.duplicate_regressor_fault) {
            report.status = RecoveryReport::Status::expected_failure;
            report.detail = e.what();
            return report;
        }
        report.status = RecoveryReport::Status::fail;
        report.detail = e.what();
        return report;
    }

    if (design.k() >= 3) report.collinearity = vif(design);

    // Bundle noise is province-level but rows replicate per frame, so the
    // frame-level standard errors understate the sampling error; rescale to
    // the effective province-level fit.
    const std::size_t provinces = report.join.provinces_joined;
    const double se_scale =
        provinces > fit.k
            ? std::sqrt(static_cast<double>(fit.n - fit.k) /
                        static_cast<double>(provinces - fit.k))
            : 1.0;
    const double t_crit =
        student_t_critical(0.05, std::max(1.0, static_cast<double>(provinces) -
                                                   static_cast<double>(fit.k)));
    bool pass = true;
    for (std::size_t j = 0; j < fit.names.size(); ++j) {
        const auto it = std::find(bundle.coefficient_names.begin(),
                                  bundle.coefficient_names.end(), fit.names[j]);
        if (it == bundle.coefficient_names.end()) continue;
        RecoveryCoefficient rc;
        rc.name = fit.names[j];
        rc.true_value =
            bundle.true_beta[static_cast<std::size_t>(it - bundle.coefficient_names.begin())];
        rc.estimate = fit.beta[j];
        rc.std_error = fit.se[j] * se_scale;
        rc.abs_error = std::abs(rc.estimate - rc.true_value);
        rc.rel_error = rc.abs_error / std::max(std::abs(rc.true_value), 1e-12);
        rc.covered_95 = rc.abs_error <= t_crit * rc.std_error;
        report.max_rel_error = std::max(report.max_rel_error, rc.rel_error);
        const double tolerance =
            std::max(4.0 * rc.std_error, 1e-6 * std::max(1.0, std::abs(rc.true_value)));
        if (rc.abs_error > tolerance) {
            pass = false;
            report.detail += (report.detail.empty() ? "" : "; ") + rc.name + " off by " +
                             csv::format_double(rc.abs_error);
        }
        report.coefficients.push_back(std::move(rc));
    }
    report.status = pass ? RecoveryReport::Status::pass : RecoveryReport::Status::fail;
    return report;
}

} // namespace polarkit
