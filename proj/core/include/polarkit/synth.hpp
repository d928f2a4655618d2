#pragma once

#include "polarkit/data_table.hpp"
#include "polarkit/ingest.hpp"
#include "polarkit/regress.hpp"
#include "polarkit/tables.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace polarkit {

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

/// Configuration for the planted-coefficient generator. Everything is
/// deterministic given rng_seed; per-province substreams keep output
/// independent of generation order.
struct SynthConfig {
    int n_provinces = 24;         // 6..81, drawn round-robin across regions
    int frames_per_province = 8;  // >= 1
    int year = 2018;
    int n_parties = 12;
    std::uint64_t rng_seed = 1;
    double noise_sd = 0.05;
    std::string outcome = "h_unweighted";

    /// Coefficients in coefficient_names() order; empty selects default_beta().
    std::vector<double> true_beta;

    Range nrp_vs_rp_range{0.2, 2.0};
    Range nrp_vs_nrp_range{0.2, 2.0};
    Range rp_vs_rp_range{0.2, 2.0};
    Range mosques_range{50.0, 2000.0};
    Range gdp_range{20000.0, 90000.0};
    Range sophistication_range{0.05, 0.6};
    Range poverty_range{2000.0, 30000.0};

    /// Correlation between the two distance regressors (for VIF studies).
    double distance_corr = 0.0;

    /// Effect of poverty_rate on the outcome. Nonzero plants an omitted
    /// variable: poverty stays out of the base model spec.
    double poverty_effect = 0.0;
    /// Correlation between poverty_rate and gdp_per_capita (drives OVB).
    double poverty_gdp_corr = 0.0;

    /// Adds gdp_per_capita to the model twice; the fit must then surface
    /// RankDeficient.
    bool duplicate_regressor_fault = false;

    /// Names for the default regression, in design-column order.
    static std::vector<std::string> coefficient_names();
    static std::vector<double> default_beta();
};

/// The regression the generator plants: the standard outcome-on-distances
/// model with region fixed effects (baseline central).
ModelSpec synth_model_spec(const SynthConfig& cfg);

struct SynthTable {
    DataTable table; // same column manifest as join_province output
    std::vector<std::string> coefficient_names;
    std::vector<double> true_beta;
    ModelSpec model;
};

/// Frame-level generation: y = X beta + eps with eps iid normal(0, sd^2) per
/// frame, so classical OLS inference on the result is exact. Throws
/// InvalidConfig.
SynthTable generate(const SynthConfig& cfg);

struct SynthBundle {
    ElectionTable elections;
    WeightTable weights;
    std::vector<DistanceRecord> distances;
    std::vector<ControlRecord> controls;
    std::vector<std::string> coefficient_names;
    std::vector<double> true_beta;
    ModelSpec model;
};

/// File-compatible generation exercising the real ingestion path: regressors
/// are province-constant and the planted outcome is baked into vote shares
/// whose unweighted entropy equals the target, so
/// parse -> entropy -> join -> fit recovers beta. Noise enters at province
/// level. Throws InvalidConfig when beta/ranges could push the entropy
/// target outside (0, ln n_parties).
SynthBundle generate_bundle(const SynthConfig& cfg);

/// Writes elections.csv, weights.csv, distances.csv, controls.csv and
/// true_coefficients.csv into dir.
void write_bundle(const SynthBundle& bundle, const std::filesystem::path& dir,
                  char delimiter = ',');

/// Vote-share vector over n parties whose Shannon entropy equals `target`
/// within 1e-12 nats (exponentially tilted family, solved by bisection).
/// Requires 0 <= target <= ln n.
std::vector<double> shares_for_entropy(double target, int n_parties);

struct RecoveryCoefficient {
    std::string name;
    double true_value = 0.0;
    double estimate = 0.0;
    /// Effective province-level standard error: bundle noise enters per
    /// province but replicates across frames, so the frame-level se is
    /// rescaled by sqrt((N-k)/(P-k)).
    double std_error = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    bool covered_95 = false; // true value inside the adjusted 95% CI
};

struct RecoveryReport {
    enum class Status { pass, fail, expected_failure };
    Status status = Status::fail;
    std::string detail;
    std::vector<RecoveryCoefficient> coefficients;
    double max_rel_error = 0.0;
    JoinReport join;
    std::optional<VifReport> collinearity;

    bool passed() const { return status != Status::fail; }
};

/// End-to-end oracle: generate_bundle -> parse-equivalent join -> ols_fit,
/// then compare against the planted coefficients. Pass requires every
/// coefficient within max(4 se, 1e-6 relative) of truth. A configured fault
/// (duplicate regressor) that surfaces RankDeficient reports
/// expected_failure.
RecoveryReport recovery_check(const SynthConfig& cfg);

} // namespace polarkit
