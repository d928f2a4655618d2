#include "polarkit/pipeline.hpp"

#include "polarkit/csv.hpp"
#include "polarkit/report.hpp"
#include "polarkit/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace polarkit {

namespace {

using nlohmann::json;

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// key = value lines, '#' comments, duplicates preserved in order.
std::vector<std::pair<std::string, std::string>> read_kv(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = csv::trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw Error(errc::invalid_config,
                        "config line " + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(csv::trim(trimmed.substr(0, eq)), csv::trim(trimmed.substr(eq + 1)));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(value);
    while (std::getline(in, cur, ',')) {
        cur = csv::trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    const std::string v = lower(value);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw Error(errc::invalid_config, "key '" + key + "': expected on/off, got '" + value + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io_error, "cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void fail_on_parse_errors(const ParseReport& report, const std::string& path) {
    if (report.ok()) return;
    std::string msg = "'" + path + "' has " + std::to_string(report.errors.size()) +
                      " rejected row(s):";
    const std::size_t show = std::min<std::size_t>(report.errors.size(), 5);
    for (std::size_t i = 0; i < show; ++i)
        msg += "\n  line " + std::to_string(report.errors[i].line) + ": " +
               report.errors[i].message;
    if (report.errors.size() > show) msg += "\n  ...";
    throw Error(report.errors.front().code, msg);
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

PipelineConfig parse_pipeline_config(std::istream& in) {
    PipelineConfig cfg;
    std::string models_value;
    for (const auto& [key, value] : read_kv(in)) {
        if (key == "distances") cfg.distances_path = value;
        else if (key == "controls") cfg.controls_path = value;
        else if (key == "regions") cfg.regions_path = value;
        else if (key == "outdir") cfg.outdir = value;
        else if (key == "baseline_region") cfg.baseline_region = lower(value);
        else if (key == "log_base") {
            if (lower(value) != "e")
                throw Error(errc::invalid_config,
                            "log_base: only 'e' (natural log, nats) is implemented");
            cfg.log_base = "e";
        } else if (key == "formats") {
            cfg.formats.clear();
            for (const auto& f : split_list(value)) {
                const std::string fl = lower(f);
                if (fl != "csv" && fl != "json" && fl != "table")
                    throw Error(errc::invalid_config, "formats: unknown format '" + f + "'");
                cfg.formats.insert(fl);
            }
        } else if (key == "vif") cfg.run_vif = parse_bool(value, key);
        else if (key == "auxiliary") cfg.run_auxiliary = parse_bool(value, key);
        else if (key == "write_analysis_table") cfg.write_analysis_table = parse_bool(value, key);
        else if (key == "delimiter") {
            if (value.size() != 1)
                throw Error(errc::invalid_config, "delimiter must be a single character");
            cfg.delimiter = value[0];
        } else if (key == "models") models_value = value;
        else if (key.rfind("year.", 0) == 0) {
            const auto rest = key.substr(5);
            const auto dot = rest.find('.');
            if (dot == std::string::npos)
                throw Error(errc::invalid_config, "expected year.<year>.elections|weights: " + key);
            int year = 0;
            try {
                year = std::stoi(rest.substr(0, dot));
            } catch (...) {
                throw Error(errc::invalid_config, "bad year in key '" + key + "'");
            }
            const std::string field = rest.substr(dot + 1);
            if (field == "elections") cfg.years[year].elections_path = value;
            else if (field == "weights") cfg.years[year].weights_path = value;
            else
                throw Error(errc::invalid_config, "unknown year field '" + field + "'");
        } else {
            throw Error(errc::invalid_config, "unknown config key '" + key + "'");
        }
    }

    if (cfg.years.empty())
        throw Error(errc::invalid_config, "config defines no year.<year>.elections/weights inputs");
    for (const auto& [year, inputs] : cfg.years) {
        if (inputs.elections_path.empty() || inputs.weights_path.empty())
            throw Error(errc::invalid_config, "year " + std::to_string(year) +
                                                  " needs both elections and weights paths");
    }
    if (cfg.distances_path.empty() || cfg.controls_path.empty())
        throw Error(errc::invalid_config, "config needs distances and controls paths");
    if (cfg.outdir.empty()) throw Error(errc::invalid_config, "config needs an outdir");
    if (!region_from_name(cfg.baseline_region))
        throw Error(errc::invalid_config, "unknown baseline_region '" + cfg.baseline_region + "'");

    if (models_value.empty() || lower(models_value) == "all") {
        for (const auto& [year, inputs] : cfg.years)
            for (const char* outcome : {"h_unweighted", "h_religiosity", "h_political"})
                cfg.models.push_back({year, outcome});
    } else {
        for (const auto& item : split_list(models_value)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw Error(errc::invalid_config,
                            "models entries are <year>:<outcome>, got '" + item + "'");
            ModelRequest req;
            try {
                req.year = std::stoi(item.substr(0, colon));
            } catch (...) {
                throw Error(errc::invalid_config, "bad year in models entry '" + item + "'");
            }
            req.outcome = item.substr(colon + 1);
            if (req.outcome != "h_unweighted" && req.outcome != "h_religiosity" &&
                req.outcome != "h_political")
                throw Error(errc::invalid_config, "unknown outcome '" + req.outcome + "'");
            if (!cfg.years.count(req.year))
                throw Error(errc::invalid_config,
                            "models entry references unconfigured year " +
                                std::to_string(req.year));
            cfg.models.push_back(std::move(req));
        }
    }
    if (cfg.models.empty()) throw Error(errc::invalid_config, "empty model list");
    return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open config file '" + path.string() + "'");
    return parse_pipeline_config(in);
}

ModelSpec parse_model_spec(std::istream& in) {
    ModelSpec spec;
    for (const auto& [key, value] : read_kv(in)) {
        if (key == "name") spec.name = value;
        else if (key == "outcome") spec.outcome = value;
        else if (key == "regressors") spec.regressors = split_list(value);
        else if (key == "categorical") {
            const auto colon = value.find(':');
            if (colon == std::string::npos)
                throw Error(errc::invalid_config,
                            "categorical entries are <column>:<baseline>, got '" + value + "'");
            spec.categoricals.push_back(
                {csv::trim(value.substr(0, colon)), csv::trim(value.substr(colon + 1))});
        } else if (key == "intercept") spec.include_intercept = parse_bool(value, key);
        else if (key == "extra") spec.extra = value;
        else
            throw Error(errc::invalid_config, "unknown model spec key '" + key + "'");
    }
    if (spec.outcome.empty())
        throw Error(errc::invalid_config, "model spec needs an outcome");
    if (spec.regressors.empty() && spec.categoricals.empty())
        throw Error(errc::invalid_config, "model spec needs regressors or categoricals");
    if (spec.name.empty()) spec.name = spec.outcome;
    return spec;
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open model spec '" + path.string() + "'");
    return parse_model_spec(in);
}

ModelSpec standard_model_spec(const std::string& outcome, const std::string& baseline_region,
                              int year) {
    ModelSpec spec;
    spec.name = outcome + "_" + std::to_string(year);
    spec.outcome = outcome;
    spec.regressors = {"nrp_vs_rp",     "nrp_vs_nrp", "num_mosques", "gdp_per_capita",
                       "economic_sophistication_proxy", "daynight",   "is_summer"};
    spec.categoricals = {{"region", baseline_region}};
    spec.include_intercept = true;
    return spec;
}

PipelineOutcome run_pipeline(const PipelineConfig& cfg) {
    if (cfg.models.empty()) throw Error(errc::invalid_config, "empty model list");

    PipelineOutcome outcome;
    std::filesystem::create_directories(cfg.outdir);

    json manifest;
    manifest["tool"] = "polarkit";
    manifest["generated_at"] = timestamp_utc();
    manifest["settings"] = {
        {"baseline_region", cfg.baseline_region},
        {"log_base", "e (all entropies in nats)"},
        {"weighted_entropy", "literal p*w terms, not renormalized"},
        {"entropy_summation", "ascending party_id, Kahan-compensated"},
        {"share_renormalization_band", "[0.90, 1.0)"},
        {"depth_normalization", "per-frame min-max to [0,1]"},
        {"region_table", cfg.regions_path.empty() ? "built-in six-region convention"
                                                  : "override: " + cfg.regions_path},
        {"vif", cfg.run_vif},
        {"auxiliary", cfg.run_auxiliary},
    };

    auto write_output = [&](const std::string& name, const std::string& content) {
        const auto path = std::filesystem::path(cfg.outdir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(errc::io_error, "cannot write '" + path.string() + "'");
        out << content;
        outcome.files_written.push_back(path.string());
    };

    // Ingest. Raw bytes are kept for the manifest fingerprints.
    json inputs = json::array();
    auto load_and_fingerprint = [&](const std::string& path) {
        std::string bytes = read_file(path);
        inputs.push_back(
            {{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", fnv1a64_hex(bytes)}});
        return bytes;
    };

    ParseOptions popts;
    popts.delimiter = cfg.delimiter;

    const std::string distance_bytes = load_and_fingerprint(cfg.distances_path);
    std::istringstream distance_stream(distance_bytes);
    auto distances = parse_distances(distance_stream, popts);
    fail_on_parse_errors(distances.report, cfg.distances_path);

    const std::string control_bytes = load_and_fingerprint(cfg.controls_path);
    std::istringstream control_stream(control_bytes);
    auto controls = parse_controls(control_stream, popts);
    fail_on_parse_errors(controls.report, cfg.controls_path);

    RegionMap region_override;
    const RegionMap* region_ptr = nullptr;
    if (!cfg.regions_path.empty()) {
        const std::string region_bytes = load_and_fingerprint(cfg.regions_path);
        std::istringstream region_stream(region_bytes);
        auto regions = parse_regions(region_stream, popts);
        fail_on_parse_errors(regions.report, cfg.regions_path);
        region_override = std::move(regions.value);
        region_ptr = &region_override;
    }

    struct YearData {
        ElectionTable elections;
        WeightTable weights;
        std::map<std::string, EntropyMeasures> entropies;
        DataTable table;
        JoinReport join;
    };
    std::map<int, YearData> years;

    for (const auto& [year, paths] : cfg.years) {
        YearData data;
        ParseOptions eopts = popts;
        eopts.election_id = std::to_string(year);
        const std::string election_bytes = load_and_fingerprint(paths.elections_path);
        std::istringstream election_stream(election_bytes);
        auto elections = parse_elections(election_stream, eopts);
        fail_on_parse_errors(elections.report, paths.elections_path);
        data.elections = std::move(elections.value);

        const std::string weight_bytes = load_and_fingerprint(paths.weights_path);
        std::istringstream weight_stream(weight_bytes);
        auto weights = parse_weights(weight_stream, popts);
        fail_on_parse_errors(weights.report, paths.weights_path);
        data.weights = std::move(weights.value);

        data.entropies = province_entropies(data.elections, data.weights);
        data.table = join_province(data.elections, data.entropies, distances.value,
                                   controls.value, year, data.join, region_ptr);
        outcome.joins[year] = data.join;

        const std::string suffix = std::to_string(year);
        {
            std::ostringstream buf;
            csv::write_row(buf, {"province", "h_unweighted", "h_religiosity", "h_political"},
                           cfg.delimiter);
            for (const auto& [province, m] : data.entropies)
                csv::write_row(buf,
                               {province, csv::format_double(m.h_unweighted),
                                csv::format_double(m.h_religiosity),
                                csv::format_double(m.h_political)},
                               cfg.delimiter);
            write_output("entropies_" + suffix + ".csv", buf.str());
        }
        write_output("join_report_" + suffix + ".json", join_report_json(data.join));
        if (cfg.write_analysis_table) {
            std::ostringstream buf;
            data.table.write_csv(buf, cfg.delimiter);
            write_output("analysis_table_" + suffix + ".csv", buf.str());
        }

        // Province-level view plus the temples-vs-distance scatter data. The
        // correlation is reported, never asserted.
        JoinReport province_join;
        DataTable province_table =
            province_level_table(data.elections, data.entropies, distances.value, controls.value,
                                 year, province_join, region_ptr);
        {
            std::ostringstream buf;
            province_table.write_csv(buf, cfg.delimiter);
            write_output("province_level_" + suffix + ".csv", buf.str());
        }
        {
            const auto& mosques = province_table.numeric_column("num_mosques");
            const auto& dist = province_table.numeric_column("nrp_vs_rp");
            std::vector<double> xs, ys;
            for (std::size_t i = 0; i < mosques.size(); ++i)
                if (!is_absent(mosques[i]) && !is_absent(dist[i])) {
                    xs.push_back(mosques[i]);
                    ys.push_back(dist[i]);
                }
            std::ostringstream buf;
            csv::write_row(buf, {"province", "num_mosques", "mean_nrp_vs_rp"}, cfg.delimiter);
            const auto& provs = province_table.text_column("province");
            for (std::size_t i = 0; i < provs.size(); ++i)
                csv::write_row(buf,
                               {provs[i], csv::format_double(mosques[i]),
                                is_absent(dist[i]) ? std::string() : csv::format_double(dist[i])},
                               cfg.delimiter);
            write_output("scatter_mosques_nrp_vs_rp_" + suffix + ".csv", buf.str());
            manifest["scatter_pearson"][suffix] =
                xs.size() >= 2 ? json(pearson_correlation(xs, ys)) : json();
        }

        years.emplace(year, std::move(data));
    }

    // Fits, grouped per year for the combined tables.
    std::map<int, std::vector<RegressionResult>> fits_by_year;
    std::map<int, DesignMatrix> design_by_year;
    for (const auto& request : cfg.models) {
        ModelStatus status;
        status.year = request.year;
        status.outcome = request.outcome;
        ModelSpec spec = standard_model_spec(request.outcome, cfg.baseline_region, request.year);
        status.name = spec.name;
        try {
            const YearData& data = years.at(request.year);
            DesignMatrix design = build_design(data.table, spec);
            RegressionResult fit = ols_fit(design);
            fit.model_name = request.outcome;
            status.ok = true;
            if (!design_by_year.count(request.year))
                design_by_year.emplace(request.year, design);
            fits_by_year[request.year].push_back(fit);

            if (cfg.formats.count("csv"))
                write_output(spec.name + ".csv", regression_csv(fit, cfg.delimiter));
            if (cfg.formats.count("json")) {
                RegressionResult named = fit;
                named.model_name = spec.name;
                write_output(spec.name + ".json", regression_json(named));
            }

            if (cfg.run_auxiliary) {
                ModelStatus aux_status;
                aux_status.year = request.year;
                aux_status.outcome = request.outcome;
                aux_status.name = spec.name + "_aux";
                try {
                    OvbComparison cmp = auxiliary_ovb(data.table, spec);
                    aux_status.ok = true;
                    if (cfg.formats.count("json"))
                        write_output(aux_status.name + ".json", ovb_json(cmp));
                    if (cfg.formats.count("table"))
                        write_output(aux_status.name + ".txt",
                                     ovb_text(cmp, "Poverty-rate probe, " + spec.name));
                } catch (const Error& e) {
                    aux_status.error = e.what();
                    outcome.all_ok = false;
                }
                outcome.models.push_back(std::move(aux_status));
            }
        } catch (const Error& e) {
            status.error = e.what();
            outcome.all_ok = false;
        }
        outcome.models.push_back(std::move(status));
    }

    if (cfg.formats.count("table")) {
        for (const auto& [year, fits] : fits_by_year) {
            if (fits.empty()) continue;
            write_output("regression_" + std::to_string(year) + ".txt",
                         coefficient_table_text(fits, "Regression results, " +
                                                          std::to_string(year) +
                                                          " (entropies in nats)"));
        }
    }

    if (cfg.run_vif) {
        for (const auto& [year, design] : design_by_year) {
            const VifReport report = vif(design);
            const std::string suffix = std::to_string(year);
            if (cfg.formats.count("table"))
                write_output("vif_" + suffix + ".txt",
                             vif_table_text(report, "Variance inflation factors, " + suffix));
            if (cfg.formats.count("csv"))
                write_output("vif_" + suffix + ".csv", vif_csv(report, cfg.delimiter));
            if (cfg.formats.count("json")) write_output("vif_" + suffix + ".json", vif_json(report));
        }
    }

    manifest["inputs"] = inputs;
    json model_statuses = json::array();
    for (const auto& status : outcome.models)
        model_statuses.push_back({{"name", status.name},
                                  {"year", status.year},
                                  {"outcome", status.outcome},
                                  {"ok", status.ok},
                                  {"error", status.error}});
    manifest["models"] = model_statuses;
    json joins;
    for (const auto& [year, join] : outcome.joins)
        joins[std::to_string(year)] = json::parse(join_report_json(join));
    manifest["joins"] = joins;

    {
        const auto path = std::filesystem::path(cfg.outdir) / "manifest.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(errc::io_error, "cannot write '" + path.string() + "'");
        out << manifest.dump(2) << "\n";
        outcome.files_written.push_back(path.string());
    }
    return outcome;
}

} // namespace polarkit
