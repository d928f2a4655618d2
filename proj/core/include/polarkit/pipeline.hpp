#pragma once

#include "polarkit/ingest.hpp"
#include "polarkit/regress.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace polarkit {

/// One requested fit: a year (selecting that year's election/weights inputs
/// and control rows) and one of the three entropy outcomes.
struct ModelRequest {
    int year = 0;
    std::string outcome;
};

struct YearInputs {
    std::string elections_path;
    std::string weights_path;
};

struct PipelineConfig {
    std::map<int, YearInputs> years;
    std::string distances_path;
    std::string controls_path;
    std::string regions_path; // optional override
    std::string outdir;
    std::vector<ModelRequest> models;
    std::set<std::string> formats{"table", "csv", "json"};
    std::string baseline_region = "central";
    std::string log_base = "e"; // reserved; only natural log is implemented
    bool run_vif = true;
    bool run_auxiliary = false;
    bool write_analysis_table = true;
    char delimiter = ',';
};

/// Plain-text key = value grammar ('#' comments). See the README for the
/// key reference. Throws InvalidConfig.
PipelineConfig parse_pipeline_config(std::istream& in);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Model-spec grammar for the regress/vif subcommands: outcome, regressors,
/// repeated `categorical = column:baseline` lines, intercept on/off,
/// optional extra column.
ModelSpec parse_model_spec(std::istream& in);
ModelSpec load_model_spec(const std::filesystem::path& path);

/// The standard outcome-on-distances specification fitted by the pipeline.
ModelSpec standard_model_spec(const std::string& outcome, const std::string& baseline_region,
                              int year);

struct ModelStatus {
    std::string name;
    int year = 0;
    std::string outcome;
    bool ok = false;
    std::string error;
};

struct PipelineOutcome {
    std::vector<ModelStatus> models;
    std::map<int, JoinReport> joins;
    std::vector<std::string> files_written;
    bool all_ok = true;
};

/// Runs ingest -> entropy -> controls -> join -> regress (+ VIF and the
/// poverty-rate probe when enabled) and writes the report bundle into
/// cfg.outdir. Ingest problems abort with file/line diagnostics; individual
/// model failures are recorded per model and do not abort the rest. Report
/// bodies are byte-stable across reruns; the timestamp lives only in
/// manifest.json.
PipelineOutcome run_pipeline(const PipelineConfig& cfg);

} // namespace polarkit
