#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polarkit/entropy.hpp"
#include "polarkit/error.hpp"
#include "polarkit/regress.hpp"
#include "polarkit/rng.hpp"
#include "polarkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace polarkit;

TEST_CASE("splitmix64 reference stream") {
    // First outputs for seed 1234567 (the published SplitMix64 recurrence).
    SplitMix64 rng(1234567);
    const std::uint64_t expected[] = {6457827717110365317ULL, 3203168211198807973ULL,
                                      9817491932198370423ULL};
    for (std::uint64_t e : expected) CHECK(rng.next() == e);
}

TEST_CASE("substreams are independent of parent advancement") {
    SplitMix64 a(99);
    SplitMix64 b(99);
    (void)b.next();
    (void)b.next();
    CHECK(a.substream(7).next() == b.substream(7).next());
    CHECK(a.substream(7).next() != a.substream(8).next());
}

TEST_CASE("uniform doubles live in [0,1) and open doubles in (0,1)") {
    SplitMix64 rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng.next_open_double();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("normal variates have roughly standard moments") {
    SplitMix64 rng(4);
    const int n = 50000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("shares_for_entropy hits targets to 1e-12") {
    for (int n : {2, 5, 12, 24}) {
        const double max_h = std::log(static_cast<double>(n));
        for (double frac : {0.999, 0.9, 0.6, 0.3, 0.1, 0.02}) {
            const double target = frac * max_h;
            const auto shares = shares_for_entropy(target, n);
            CHECK(std::abs(shannon_entropy(shares) - target) < 1e-12);
            double sum = 0.0;
            for (double p : shares) sum += p;
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
        CHECK(shannon_entropy(shares_for_entropy(max_h, n)) == doctest::Approx(max_h));
        CHECK(shannon_entropy(shares_for_entropy(0.0, n)) == 0.0);
    }
    CHECK_THROWS_AS(shares_for_entropy(10.0, 4), Error);
}

TEST_CASE("generation is byte-identical under a fixed seed") {
    SynthConfig cfg;
    cfg.rng_seed = 31337;
    cfg.n_provinces = 10;
    cfg.frames_per_province = 4;

    std::ostringstream a, b;
    generate(cfg).table.write_csv(a);
    generate(cfg).table.write_csv(b);
    CHECK(a.str() == b.str());

    std::ostringstream ba, bb;
    write_elections(ba, generate_bundle(cfg).elections);
    write_elections(bb, generate_bundle(cfg).elections);
    CHECK(ba.str() == bb.str());

    cfg.rng_seed = 31338;
    std::ostringstream c;
    generate(cfg).table.write_csv(c);
    CHECK(a.str() != c.str());
}

TEST_CASE("noiseless frame-level generation recovers coefficients to 1e-6") {
    SynthConfig cfg;
    cfg.rng_seed = 8;
    cfg.noise_sd = 0.0;
    const auto synth = generate(cfg);
    const auto fit = ols_fit(build_design(synth.table, synth.model));
    REQUIRE(fit.names.size() == synth.coefficient_names.size());
    for (std::size_t j = 0; j < fit.names.size(); ++j) {
        CHECK(fit.names[j] == synth.coefficient_names[j]);
        const double tol = 1e-6 * std::max(1.0, std::abs(synth.true_beta[j]));
        CHECK(std::abs(fit.beta[j] - synth.true_beta[j]) < tol);
    }
}

TEST_CASE("recovery_check passes end-to-end through the real ingestion path") {
    SynthConfig cfg;
    cfg.rng_seed = 9;
    cfg.noise_sd = 0.0;
    const auto report = recovery_check(cfg);
    CHECK(report.status == RecoveryReport::Status::pass);
    CHECK(report.max_rel_error < 1e-6);
    CHECK(report.join.dropped_rows == 0);

    SynthConfig noisy = cfg;
    noisy.noise_sd = 0.03;
    const auto noisy_report = recovery_check(noisy);
    CHECK(noisy_report.status == RecoveryReport::Status::pass);
}

TEST_CASE("a planted duplicate regressor surfaces RankDeficient as expected-failure") {
    SynthConfig cfg;
    cfg.rng_seed = 10;
    cfg.duplicate_regressor_fault = true;
    const auto report = recovery_check(cfg);
    CHECK(report.status == RecoveryReport::Status::expected_failure);
    CHECK(report.detail.find("RankDeficient") != std::string::npos);
}

TEST_CASE("correlated distance regressors show the closed-form VIF") {
    SynthConfig cfg;
    cfg.rng_seed = 11;
    cfg.n_provinces = 40;
    cfg.frames_per_province = 25;
    cfg.distance_corr = 0.95;
    const auto synth = generate(cfg);
    const auto report = vif(build_design(synth.table, synth.model));

    const double expected = 1.0 / (1.0 - 0.95 * 0.95); // 10.256...
    for (const auto& e : report.entries) {
        if (e.name == "nrp_vs_rp" || e.name == "nrp_vs_nrp") {
            CHECK(!e.infinite);
            CHECK(e.vif > expected * 0.85);
            CHECK(e.vif < expected * 1.15);
        }
    }
}

TEST_CASE("doubling frames_per_province reduces the median coefficient error") {
    auto median_abs_error = [](int frames) {
        std::vector<double> errors;
        for (int seed = 0; seed < 15; ++seed) {
            SynthConfig cfg;
            cfg.rng_seed = 2000 + static_cast<std::uint64_t>(seed);
            cfg.n_provinces = 12;
            cfg.frames_per_province = frames;
            cfg.noise_sd = 0.25;
            const auto synth = generate(cfg);
            const auto fit = ols_fit(build_design(synth.table, synth.model));
            // Slope on nrp_vs_rp (index 1 in the canonical order).
            errors.push_back(std::abs(fit.beta[1] - synth.true_beta[1]));
        }
        std::sort(errors.begin(), errors.end());
        return errors[errors.size() / 2];
    };
    CHECK(median_abs_error(16) < median_abs_error(4));
}

TEST_CASE("config validation") {
    SynthConfig cfg;
    cfg.n_provinces = 3;
    CHECK_THROWS_AS(generate(cfg), Error);
    cfg.n_provinces = 24;
    cfg.true_beta = {1.0, 2.0};
    CHECK_THROWS_AS(generate(cfg), Error);
    cfg.true_beta.clear();
    cfg.outcome = "banana";
    CHECK_THROWS_AS(generate(cfg), Error);
    cfg.outcome = "h_unweighted";
    cfg.noise_sd = -1.0;
    CHECK_THROWS_AS(generate(cfg), Error);
    cfg.noise_sd = 0.0;

    // Bundle mode rejects targets that leave (0, ln n_parties).
    SynthConfig wild;
    wild.rng_seed = 5;
    wild.true_beta = SynthConfig::default_beta();
    wild.true_beta[0] = 50.0; // intercept way beyond ln(12)
    try {
        generate_bundle(wild);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == errc::invalid_config);
    }
}

TEST_CASE("generated tables satisfy the ingest invariants") {
    SynthConfig cfg;
    cfg.rng_seed = 12;
    const auto bundle = generate_bundle(cfg);
    for (const auto& [province, votes] : bundle.elections.rows) {
        CHECK(is_known_province(province));
        double sum = 0.0;
        for (const auto& [party, p] : votes.shares) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    for (const auto& rec : bundle.distances) {
        CHECK((rec.daynight == 0 || rec.daynight == 1));
        CHECK((rec.nrp_vs_nrp || rec.rp_vs_rp || rec.nrp_vs_rp));
    }
    for (const auto& rec : bundle.controls) {
        CHECK(rec.total_gdp > 0.0);
        const double components = rec.agriculture_gdp + rec.manufacturing_gdp +
                                  rec.industry_gdp + rec.services_gdp + rec.finance_gdp;
        CHECK(components <= rec.total_gdp * (1.0 + 1e-9));
    }
}
