// Command-line front end: validate | entropy | distances | merge | regress |
// vif | synth | report. Exit codes: 0 success, 1 data error, 2 config error,
// 3 numerical failure.

#include "polarkit/controls.hpp"
#include "polarkit/csv.hpp"
#include "polarkit/entropy.hpp"
#include "polarkit/error.hpp"
#include "polarkit/geometry.hpp"
#include "polarkit/ingest.hpp"
#include "polarkit/pipeline.hpp"
#include "polarkit/regress.hpp"
#include "polarkit/report.hpp"
#include "polarkit/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace polarkit;
namespace fs = std::filesystem;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open input file '" + path + "'");
    return in;
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io_error, "cannot write '" + path + "'");
    out << content;
}

void print_issues(const ParseReport& report, const std::string& path) {
    for (const auto& w : report.warnings)
        std::cerr << path << ":" << w.line << ": warning: " << w.message << "\n";
    for (const auto& e : report.errors)
        std::cerr << path << ":" << e.line << ": error [" << errc_name(e.code)
                  << "]: " << e.message << "\n";
}

template <typename T>
T parse_or_die(Parsed<T> parsed, const std::string& path) {
    print_issues(parsed.report, path);
    if (!parsed.report.ok())
        throw Error(parsed.report.errors.front().code,
                    "'" + path + "' has " + std::to_string(parsed.report.errors.size()) +
                        " rejected row(s)");
    return std::move(parsed.value);
}

struct GlobalFlags {
    std::string format = "table";
    std::string baseline_region = "central";
    std::string log_base = "e";
    std::uint64_t seed = 1;
    char delimiter = ',';
};

int cmd_validate(const std::string& schema, const std::string& input, const GlobalFlags& g) {
    ParseOptions opts;
    opts.delimiter = g.delimiter;
    auto in = open_input(input);
    ParseReport report;
    if (schema == "elections") report = parse_elections(in, opts).report;
    else if (schema == "weights") report = parse_weights(in, opts).report;
    else if (schema == "distances") report = parse_distances(in, opts).report;
    else if (schema == "controls") report = parse_controls(in, opts).report;
    else if (schema == "detections") report = parse_detections(in, opts).report;
    else throw Error(errc::invalid_config, "unknown schema '" + schema + "'");
    std::cout << parse_report_json(report, input);
    return report.ok() ? 0 : 1;
}

int cmd_entropy(const std::string& elections_path, const std::string& weights_path,
                const std::string& out_path, bool enp, const std::string& election_id,
                const GlobalFlags& g) {
    ParseOptions opts;
    opts.delimiter = g.delimiter;
    opts.election_id = election_id;
    auto ein = open_input(elections_path);
    auto elections = parse_or_die(parse_elections(ein, opts), elections_path);
    auto win = open_input(weights_path);
    auto weights = parse_or_die(parse_weights(win, opts), weights_path);

    const auto measures = province_entropies(elections, weights);

    std::ostringstream buf;
    std::vector<std::string> header{"province", "h_unweighted", "h_religiosity", "h_political"};
    if (enp) header.push_back("enp");
    csv::write_row(buf, header, g.delimiter);
    for (const auto& [province, m] : measures) {
        std::vector<std::string> row{province, csv::format_double(m.h_unweighted),
                                     csv::format_double(m.h_religiosity),
                                     csv::format_double(m.h_political)};
        if (enp) {
            std::vector<double> shares;
            for (const auto& [party, p] : elections.rows.at(province).shares)
                shares.push_back(p);
            row.push_back(csv::format_double(effective_number_of_parties(shares)));
        }
        csv::write_row(buf, row, g.delimiter);
    }
    write_text(out_path, buf.str());
    return 0;
}

int cmd_distances(const std::string& detections_path, const std::string& depth_dir,
                  double aspect, bool ground_contact, const std::string& out_path,
                  const GlobalFlags& g) {
    ParseOptions opts;
    opts.delimiter = g.delimiter;
    auto in = open_input(detections_path);
    auto rows = parse_or_die(parse_detections(in, opts), detections_path);

    auto depth_lookup = [&](const std::string& frame_id) -> std::optional<DepthMap> {
        if (depth_dir.empty()) return std::nullopt;
        const fs::path path = fs::path(depth_dir) / (frame_id + ".txt");
        std::ifstream din(path);
        if (!din) return std::nullopt;
        return read_depth_map(din);
    };
    const FrameAssembly assembly =
        assemble_distance_records(rows, depth_lookup, aspect, ground_contact);
    for (const auto& w : assembly.warnings) std::cerr << "warning: " << w << "\n";
    if (assembly.frames_without_pairs > 0)
        std::cerr << "note: " << assembly.frames_without_pairs
                  << " frame(s) had fewer than two detections and were skipped\n";

    std::ostringstream buf;
    write_distances(buf, assembly.records, g.delimiter);
    write_text(out_path, buf.str());
    return 0;
}

int cmd_merge(const std::string& elections_path, const std::string& weights_path,
              const std::string& distances_path, const std::string& controls_path, int year,
              const std::string& regions_path, const std::string& out_path,
              const std::string& join_report_path, bool province_level, const GlobalFlags& g) {
    ParseOptions opts;
    opts.delimiter = g.delimiter;
    opts.election_id = std::to_string(year);
    auto ein = open_input(elections_path);
    auto elections = parse_or_die(parse_elections(ein, opts), elections_path);
    auto win = open_input(weights_path);
    auto weights = parse_or_die(parse_weights(win, opts), weights_path);
    auto din = open_input(distances_path);
    auto distances = parse_or_die(parse_distances(din, opts), distances_path);
    auto cin_ = open_input(controls_path);
    auto controls = parse_or_die(parse_controls(cin_, opts), controls_path);

    RegionMap region_override;
    const RegionMap* region_ptr = nullptr;
    if (!regions_path.empty()) {
        auto rin = open_input(regions_path);
        region_override = parse_or_die(parse_regions(rin, opts), regions_path);
        region_ptr = &region_override;
    }

    const auto entropies = province_entropies(elections, weights);
    JoinReport report;
    DataTable table =
        province_level
            ? province_level_table(elections, entropies, distances, controls, year, report,
                                   region_ptr)
            : join_province(elections, entropies, distances, controls, year, report, region_ptr);

    std::ostringstream buf;
    table.write_csv(buf, g.delimiter);
    write_text(out_path, buf.str());
    if (join_report_path.empty())
        std::cerr << join_report_json(report);
    else
        write_text(join_report_path, join_report_json(report));
    return 0;
}

DataTable load_table(const std::string& path, char delimiter) {
    auto in = open_input(path);
    return DataTable::read_csv(in, delimiter);
}

int cmd_regress(const std::string& table_path, const std::string& model_path, bool auxiliary,
                const std::string& out_path, const GlobalFlags& g) {
    DataTable table = load_table(table_path, g.delimiter);
    ModelSpec spec = load_model_spec(model_path);

    if (auxiliary) {
        OvbComparison cmp = auxiliary_ovb(table, spec);
        if (g.format == "json") write_text(out_path, ovb_json(cmp));
        else write_text(out_path, ovb_text(cmp, "Poverty-rate probe, " + spec.name));
        return 0;
    }

    RegressionResult fit = ols_fit(build_design(table, spec));
    fit.model_name = spec.name;
    if (g.format == "csv") write_text(out_path, regression_csv(fit, g.delimiter));
    else if (g.format == "json") write_text(out_path, regression_json(fit));
    else {
        std::vector<RegressionResult> fits{fit};
        write_text(out_path, coefficient_table_text(fits, "Regression results: " + spec.name));
    }
    return 0;
}

int cmd_vif(const std::string& table_path, const std::string& model_path,
            const std::string& out_path, const GlobalFlags& g) {
    DataTable table = load_table(table_path, g.delimiter);
    ModelSpec spec = load_model_spec(model_path);
    const VifReport report = vif(build_design(table, spec));
    if (g.format == "csv") write_text(out_path, vif_csv(report, g.delimiter));
    else if (g.format == "json") write_text(out_path, vif_json(report));
    else write_text(out_path, vif_table_text(report, "Variance inflation factors: " + spec.name));
    return 0;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out_dir, bool recovery,
              const GlobalFlags& g) {
    if (recovery) {
        const RecoveryReport report = recovery_check(cfg);
        nlohmann::json doc;
        doc["status"] = report.status == RecoveryReport::Status::pass ? "pass"
                        : report.status == RecoveryReport::Status::expected_failure
                            ? "expected_failure"
                            : "fail";
        doc["detail"] = report.detail;
        doc["max_rel_error"] = report.max_rel_error;
        nlohmann::json coefs = nlohmann::json::array();
        for (const auto& c : report.coefficients)
            coefs.push_back({{"term", c.name},
                             {"true", c.true_value},
                             {"estimate", c.estimate},
                             {"std_error", c.std_error},
                             {"abs_error", c.abs_error},
                             {"rel_error", c.rel_error},
                             {"covered_95", c.covered_95}});
        doc["coefficients"] = coefs;
        if (report.collinearity) {
            nlohmann::json v = nlohmann::json::array();
            for (const auto& e : report.collinearity->entries)
                v.push_back({{"term", e.name},
                             {"vif", e.infinite ? nlohmann::json() : nlohmann::json(e.vif)}});
            doc["vif"] = v;
        }
        std::cout << doc.dump(2) << "\n";
        return report.passed() ? 0 : 1;
    }
    const SynthBundle bundle = generate_bundle(cfg);
    write_bundle(bundle, out_dir, g.delimiter);
    std::cerr << "wrote synthetic bundle (" << bundle.distances.size() << " distance rows, "
              << bundle.controls.size() << " provinces) to " << out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& config_path, const GlobalFlags& g, bool baseline_overridden) {
    PipelineConfig cfg = load_pipeline_config(config_path);
    if (baseline_overridden) cfg.baseline_region = g.baseline_region;
    const PipelineOutcome outcome = run_pipeline(cfg);
    for (const auto& status : outcome.models) {
        if (status.ok)
            std::cerr << "model " << status.name << ": ok\n";
        else
            std::cerr << "model " << status.name << ": FAILED: " << status.error << "\n";
    }
    std::cerr << outcome.files_written.size() << " file(s) written to " << cfg.outdir << "\n";
    return outcome.all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"polarkit: electoral entropy measures, pedestrian distance aggregation, and "
                 "OLS diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    std::string delim = ",";
    std::string global_config;
    app.add_option("--config", global_config, "Pipeline config file (used by `report`)");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "table"}))
        ->capture_default_str();
    app.add_option("--baseline-region", g.baseline_region, "Baseline region level")
        ->check(CLI::IsMember({"central", "east", "marmara", "south", "southeast", "west"}))
        ->capture_default_str();
    app.add_option("--log-base", g.log_base, "Entropy log base (reserved; only 'e')")
        ->check(CLI::IsMember({"e"}))
        ->capture_default_str();
    app.add_option("--seed", g.seed, "RNG seed for synth")->capture_default_str();
    app.add_option("--delim", delim, "Field delimiter for tabular IO")->capture_default_str();

    // validate
    auto* validate = app.add_subcommand("validate", "Parse and validate one input file");
    std::string schema, input;
    validate->add_option("--schema", schema, "File schema")
        ->required()
        ->check(CLI::IsMember({"elections", "weights", "distances", "controls", "detections"}));
    validate->add_option("--input", input, "Input file")->required();

    // entropy
    auto* entropy_cmd = app.add_subcommand("entropy", "Per-province entropy table");
    std::string elections_path, weights_path, out_path, election_id = "election";
    bool enp = false;
    entropy_cmd->add_option("--elections", elections_path)->required();
    entropy_cmd->add_option("--weights", weights_path)->required();
    entropy_cmd->add_option("--out", out_path, "Output path ('-' for stdout)");
    entropy_cmd->add_option("--election-id", election_id);
    entropy_cmd->add_flag("--enp", enp, "Append an effective-number-of-parties column");

    // distances
    auto* distances_cmd =
        app.add_subcommand("distances", "Detections + depth grids -> distance records");
    std::string detections_path, depth_dir, dist_out;
    double aspect = 1.0;
    bool ground_contact = false;
    distances_cmd->add_option("--detections", detections_path)->required();
    distances_cmd->add_option("--depth-dir", depth_dir,
                              "Directory of <frame_id>.txt depth grids");
    distances_cmd->add_option("--aspect", aspect, "Aspect ratio for frames without depth data")
        ->capture_default_str();
    distances_cmd->add_flag("--ground-contact", ground_contact,
                            "Measure from box bottoms instead of centers");
    distances_cmd->add_option("--out", dist_out, "Output path ('-' for stdout)");

    // merge
    auto* merge_cmd = app.add_subcommand("merge", "Join the four inputs into an analysis table");
    std::string m_elections, m_weights, m_distances, m_controls, m_regions, m_out, m_join_report;
    int m_year = 0;
    bool m_province_level = false;
    merge_cmd->add_option("--elections", m_elections)->required();
    merge_cmd->add_option("--weights", m_weights)->required();
    merge_cmd->add_option("--distances", m_distances)->required();
    merge_cmd->add_option("--controls", m_controls)->required();
    merge_cmd->add_option("--year", m_year)->required();
    merge_cmd->add_option("--regions", m_regions, "province,region override file");
    merge_cmd->add_option("--out", m_out, "Analysis table output ('-' for stdout)");
    merge_cmd->add_option("--join-report", m_join_report, "Join report path (default: stderr)");
    merge_cmd->add_flag("--province-level", m_province_level,
                        "One row per province (scatter-ready) instead of per frame");

    // regress
    auto* regress_cmd = app.add_subcommand("regress", "Fit a model on an analysis table");
    std::string r_table, r_model, r_out;
    bool r_aux = false;
    regress_cmd->add_option("--table", r_table, "Analysis table (merge output)")->required();
    regress_cmd->add_option("--model", r_model, "Model spec file")->required();
    regress_cmd->add_flag("--auxiliary", r_aux, "Also fit with the extra column appended");
    regress_cmd->add_option("--out", r_out, "Output path ('-' for stdout)");

    // vif
    auto* vif_cmd = app.add_subcommand("vif", "Variance inflation factors for a model");
    std::string v_table, v_model, v_out;
    vif_cmd->add_option("--table", v_table)->required();
    vif_cmd->add_option("--model", v_model)->required();
    vif_cmd->add_option("--out", v_out, "Output path ('-' for stdout)");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic input bundle");
    SynthConfig synth_cfg;
    std::string synth_out = "synth_out";
    bool recovery = false;
    synth_cmd->add_option("--out", synth_out, "Bundle directory")->capture_default_str();
    synth_cmd->add_option("--provinces", synth_cfg.n_provinces)->capture_default_str();
    synth_cmd->add_option("--frames", synth_cfg.frames_per_province)->capture_default_str();
    synth_cmd->add_option("--year", synth_cfg.year)->capture_default_str();
    synth_cmd->add_option("--parties", synth_cfg.n_parties)->capture_default_str();
    synth_cmd->add_option("--noise", synth_cfg.noise_sd)->capture_default_str();
    synth_cmd->add_option("--distance-corr", synth_cfg.distance_corr)->capture_default_str();
    synth_cmd->add_flag("--duplicate-regressor", synth_cfg.duplicate_regressor_fault,
                        "Plant a duplicated regressor (rank-deficiency drill)");
    synth_cmd->add_flag("--recovery-check", recovery,
                        "Run the end-to-end recovery check instead of writing files");

    // report
    auto* report_cmd = app.add_subcommand("report", "Run the full pipeline from a config file");
    std::string config_path;
    report_cmd->add_option("--config", config_path, "Pipeline config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    g.delimiter = delim.empty() ? ',' : delim[0];
    synth_cfg.rng_seed = g.seed;

    try {
        if (*validate) return cmd_validate(schema, input, g);
        if (*entropy_cmd)
            return cmd_entropy(elections_path, weights_path, out_path, enp, election_id, g);
        if (*distances_cmd)
            return cmd_distances(detections_path, depth_dir, aspect, ground_contact, dist_out, g);
        if (*merge_cmd)
            return cmd_merge(m_elections, m_weights, m_distances, m_controls, m_year, m_regions,
                             m_out, m_join_report, m_province_level, g);
        if (*regress_cmd) return cmd_regress(r_table, r_model, r_aux, r_out, g);
        if (*vif_cmd) return cmd_vif(v_table, v_model, v_out, g);
        if (*synth_cmd) return cmd_synth(synth_cfg, synth_out, recovery, g);
        if (*report_cmd) {
            if (config_path.empty()) config_path = global_config;
            if (config_path.empty())
                throw polarkit::Error(polarkit::errc::invalid_config,
                                      "report needs --config <path>");
            return cmd_report(config_path, g, app.count("--baseline-region") > 0);
        }
    } catch (const polarkit::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
