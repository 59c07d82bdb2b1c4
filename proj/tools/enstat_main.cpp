// enstat: statistical analysis of green-building energy time series.
//
// Subcommands cover the full pipeline: clean, describe, correlate, levene,
// anova, regress, predict, and report (everything at once). Exit codes:
// 0 ok, 2 I/O or parse failure, 3 cleaning removed every row, 4 analysis
// error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "enstat/dataset.hpp"
#include "enstat/descriptive.hpp"
#include "enstat/errors.hpp"
#include "enstat/inference.hpp"
#include "enstat/regression.hpp"
#include "enstat/report.hpp"

namespace {

using namespace enstat;

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitAnalysis = 4;

struct EmptyDataset : std::runtime_error {
    EmptyDataset() : std::runtime_error("cleaning removed every row") {}
};

struct Options {
    std::string input;
    std::string format = "text";
    std::string output_dir;
    std::string outlier_rule = "tukey:1.5";
    std::vector<std::string> filters;
    std::vector<std::string> variables;
    std::size_t groups = 25;
    std::string group_on = "index";
    std::string group_scheme = "bins";
    std::string response;
    std::vector<std::string> candidates;
    double p_enter = 0.05;
    std::vector<std::string> ranges;  // "var=lo,hi"
    std::string bin_rule = "sturges";
};

double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ValidationError(context + ": '" + text + "' is not a number");
    }
}

OutlierRule parse_outlier_rule(const std::string& text) {
    if (text == "none") return OutlierRule::none();
    if (text == "tukey") return OutlierRule::tukey();
    if (text.rfind("tukey:", 0) == 0) {
        return OutlierRule::tukey(parse_double(text.substr(6), "outlier rule"));
    }
    throw ValidationError("unknown outlier rule '" + text + "' (use none or tukey:K)");
}

RangeSpec build_range_spec(const std::vector<std::string>& overrides) {
    RangeSpec spec = RangeSpec::defaults();
    for (const auto& text : overrides) {
        const auto eq = text.find('=');
        const auto comma = text.find(',', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || comma == std::string::npos) {
            throw ValidationError("range override '" + text + "' must look like var=lo,hi");
        }
        const std::string name = text.substr(0, eq);
        spec.intervals[name] = {parse_double(text.substr(eq + 1, comma - eq - 1), "range"),
                                parse_double(text.substr(comma + 1), "range")};
    }
    return spec;
}

RowPredicate build_predicate(const std::vector<std::string>& filters) {
    RowPredicate predicate;
    for (const auto& text : filters) predicate.push_back(parse_comparison(text));
    return predicate;
}

std::vector<std::string> analysis_variables(const Dataset& d, const Options& opt) {
    if (!opt.variables.empty()) {
        for (const auto& name : opt.variables) {
            if (!d.has_variable(name)) {
                throw ValidationError("unknown variable '" + name + "'");
            }
        }
        return opt.variables;
    }
    std::vector<std::string> names;
    for (const auto& var : d.schema()) names.push_back(var.name);
    return names;
}

// Load, clean per the configured rules, and apply filters. Analyses operate
// on the result.
Dataset load_cleaned(const Options& opt, CleaningReport* report_out = nullptr) {
    if (opt.input.empty()) {
        throw IoError("no input file given (use --input)");
    }
    const Dataset raw = load_csv_file(opt.input, Dataset::default_schema());
    auto [cleaned, report] = clean(raw, build_range_spec(opt.ranges),
                                   parse_outlier_rule(opt.outlier_rule));
    if (report_out) *report_out = report;
    if (cleaned.row_count() == 0) throw EmptyDataset();
    if (!opt.filters.empty()) {
        cleaned = filter_rows(cleaned, build_predicate(opt.filters));
        if (cleaned.row_count() == 0) throw EmptyDataset();
    }
    return cleaned;
}

GroupingScheme grouping_scheme(const Options& opt) {
    if (opt.group_scheme == "distinct") {
        if (opt.group_on == "index") {
            throw ValidationError("--group-scheme distinct needs --group-on <variable>");
        }
        return GroupingScheme::by_column(opt.group_on);
    }
    return GroupingScheme::equal_count_bins(opt.group_on == "index" ? "" : opt.group_on,
                                            opt.groups);
}

void emit(const Options& opt, const std::string& name, const Report& report,
          const nlohmann::json& json) {
    std::string text;
    if (opt.format == "json") {
        text = json.dump(2);
        text += '\n';
    } else {
        text = render_text(report);
    }
    if (opt.output_dir.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(opt.output_dir);
    const auto path = std::filesystem::path(opt.output_dir) /
                      (name + (opt.format == "json" ? ".json" : ".txt"));
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
}

// --- subcommand bodies -----------------------------------------------------

int run_clean(const Options& opt, const std::string& output_csv) {
    if (opt.input.empty()) throw IoError("no input file given (use --input)");
    const Dataset raw = load_csv_file(opt.input, Dataset::default_schema());
    auto [cleaned, report] = clean(raw, build_range_spec(opt.ranges),
                                   parse_outlier_rule(opt.outlier_rule));

    save_csv_file(cleaned, output_csv.empty() ? "cleaned.csv" : output_csv);

    Report rep;
    rep.sections.push_back(cleaning_table(report));
    emit(opt, "clean", rep, to_json(report));
    return report.empty_result ? kExitEmpty : kExitOk;
}

int run_describe(const Options& opt) {
    const Dataset d = load_cleaned(opt);
    const auto names = analysis_variables(d, opt);
    const BinRule rule = opt.bin_rule == "fd" ? BinRule::freedman_diaconis : BinRule::sturges;

    std::vector<DescriptiveSummary> summaries;
    nlohmann::json json = nlohmann::json::object();
    Report rep;
    for (const auto& name : names) {
        const auto values = d.values(name);
        auto summary = summarize(values);
        json[name] = to_json(summary);
        json[name]["histogram"] = to_json(histogram(values, rule));
        if (values.size() >= 4) {
            json[name]["boxplot"] = to_json(boxplot_stats(values));
        }
        summaries.push_back(std::move(summary));
    }
    rep.sections.push_back(descriptives_table(names, summaries));
    for (const auto& name : names) {
        const auto values = d.values(name);
        rep.sections.push_back(histogram_table(name, histogram(values, rule)));
        if (values.size() >= 4) {
            rep.sections.push_back(boxplot_table(name, boxplot_stats(values)));
        }
    }
    emit(opt, "describe", rep, json);
    return kExitOk;
}

int run_correlate(const Options& opt) {
    const Dataset d = load_cleaned(opt);
    const auto names = analysis_variables(d, opt);
    const auto matrix = correlation_matrix(d, names);

    Report rep;
    rep.sections.push_back(correlations_table(matrix));
    emit(opt, "correlate", rep, to_json(matrix));
    return kExitOk;
}

int run_levene(const Options& opt) {
    const Dataset d = load_cleaned(opt);
    const auto names = analysis_variables(d, opt);
    const auto scheme = grouping_scheme(opt);

    std::vector<std::vector<LeveneResult>> results;
    nlohmann::json json = nlohmann::json::object();
    for (const auto& name : names) {
        const auto groups = make_groups(d, name, scheme);
        std::vector<LeveneResult> per_variant;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto variant : {LeveneVariant::mean, LeveneVariant::median,
                                   LeveneVariant::median_adjusted_df,
                                   LeveneVariant::trimmed_mean}) {
            per_variant.push_back(levene(groups, variant));
            arr.push_back(to_json(per_variant.back()));
        }
        json[name] = arr;
        results.push_back(std::move(per_variant));
    }
    Report rep;
    rep.sections.push_back(levene_table(names, results));
    emit(opt, "levene", rep, json);
    return kExitOk;
}

int run_anova(const Options& opt) {
    const Dataset d = load_cleaned(opt);
    const auto names = analysis_variables(d, opt);
    const auto scheme = grouping_scheme(opt);

    std::vector<AnovaResult> results;
    nlohmann::json json = nlohmann::json::object();
    for (const auto& name : names) {
        results.push_back(anova_oneway(make_groups(d, name, scheme)));
        json[name] = to_json(results.back());
    }
    Report rep;
    rep.sections.push_back(anova_table(names, results));
    emit(opt, "anova", rep, json);
    return kExitOk;
}

std::vector<std::string> default_candidates(const Dataset& d) {
    std::vector<std::string> names;
    for (const auto& var : d.schema()) {
        if (var.role == Role::weather) names.push_back(var.name);
    }
    return names;
}

void append_regression_sections(Report& rep, nlohmann::json& json, const Dataset& d,
                                const std::string& response,
                                const std::vector<std::string>& candidates, double p_enter) {
    const auto trace = stepwise_forward(d, response, candidates, p_enter);
    json[response] = to_json(trace);
    rep.sections.push_back(model_summary_table(response, trace));
    if (!trace.rows.empty()) {
        std::vector<OlsFit> step_fits;
        std::vector<std::string> entered;
        for (const auto& row : trace.rows) {
            entered.push_back(row.entered);
            step_fits.push_back(ols_fit(d, response, entered));
        }
        rep.sections.push_back(coefficients_table(response, step_fits));
        const auto stats = residual_statistics(*trace.final);
        json[response]["residual_statistics"] = to_json(stats);
        rep.sections.push_back(residual_stats_table(response, stats));
    }
    if (!trace.excluded.empty()) {
        rep.sections.push_back(excluded_variables_table(response, trace));
    }
}

int run_regress(const Options& opt, const std::string& save_model) {
    if (opt.response.empty()) {
        throw ValidationError("regress requires --response");
    }
    const Dataset d = load_cleaned(opt);
    const auto candidates = opt.candidates.empty() ? default_candidates(d) : opt.candidates;

    Report rep;
    nlohmann::json json = nlohmann::json::object();
    append_regression_sections(rep, json, d, opt.response, candidates, opt.p_enter);

    if (!save_model.empty()) {
        const auto& trace_json = json[opt.response];
        if (trace_json["final"].is_null()) {
            throw AnalysisError("no variable qualified for entry; nothing to save");
        }
        std::ofstream out(save_model);
        if (!out) throw IoError("cannot open '" + save_model + "' for writing");
        out << trace_json["final"].dump(2) << '\n';
    }
    emit(opt, "regress", rep, json);
    return kExitOk;
}

int run_predict(const Options& opt, const std::string& model_name,
                const std::string& model_file,
                const std::map<std::string, double>& inputs,
                const std::vector<std::string>& extra) {
    std::map<std::string, double> all_inputs = inputs;
    for (const auto& text : extra) {
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("--set expects name=value, got '" + text + "'");
        }
        all_inputs[text.substr(0, eq)] = parse_double(text.substr(eq + 1), "--set");
    }

    double value = 0.0;
    std::string label;
    if (!model_file.empty()) {
        std::ifstream in(model_file);
        if (!in) throw IoError("cannot open '" + model_file + "' for reading");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(e.what(), 0);
        }
        OlsFit fit;
        fit.response = j.at("response").get<std::string>();
        fit.predictors = j.at("predictors").get<std::vector<std::string>>();
        fit.b = j.at("b").get<std::vector<double>>();
        if (fit.b.size() != fit.predictors.size() + 1) {
            throw ValidationError("model file: coefficient count does not match predictors");
        }
        value = predict(fit, all_inputs);
        label = fit.response;
    } else {
        const auto& model = published_model(model_name);
        value = predict(model, all_inputs);
        label = model.name;
    }

    if (opt.format == "json") {
        nlohmann::json j = {{"model", label}, {"inputs", all_inputs}, {"predicted", value}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << fmt_fixed(value, 3) << '\n';
    }
    return kExitOk;
}

int run_report(const Options& opt) {
    CleaningReport cleaning;
    const Dataset d = load_cleaned(opt, &cleaning);
    const auto names = analysis_variables(d, opt);
    const auto scheme = grouping_scheme(opt);

    Report rep;
    nlohmann::json json = nlohmann::json::object();
    json["cleaning"] = to_json(cleaning);
    rep.sections.push_back(cleaning_table(cleaning));

    // Descriptives
    {
        std::vector<DescriptiveSummary> summaries;
        nlohmann::json block = nlohmann::json::object();
        for (const auto& name : names) {
            auto summary = summarize(d.values(name));
            block[name] = to_json(summary);
            summaries.push_back(std::move(summary));
        }
        rep.sections.push_back(descriptives_table(names, summaries));
        json["descriptives"] = block;
    }

    // Homogeneity of variances + ANOVA
    {
        std::vector<std::vector<LeveneResult>> levene_results;
        std::vector<AnovaResult> anova_results;
        nlohmann::json levene_block = nlohmann::json::object();
        nlohmann::json anova_block = nlohmann::json::object();
        for (const auto& name : names) {
            const auto groups = make_groups(d, name, scheme);
            std::vector<LeveneResult> per_variant;
            nlohmann::json arr = nlohmann::json::array();
            for (const auto variant : {LeveneVariant::mean, LeveneVariant::median,
                                       LeveneVariant::median_adjusted_df,
                                       LeveneVariant::trimmed_mean}) {
                per_variant.push_back(levene(groups, variant));
                arr.push_back(to_json(per_variant.back()));
            }
            levene_block[name] = arr;
            levene_results.push_back(std::move(per_variant));
            anova_results.push_back(anova_oneway(groups));
            anova_block[name] = to_json(anova_results.back());
        }
        rep.sections.push_back(levene_table(names, levene_results));
        rep.sections.push_back(anova_table(names, anova_results));
        json["levene"] = levene_block;
        json["anova"] = anova_block;
    }

    // Correlations
    {
        const auto matrix = correlation_matrix(d, names);
        rep.sections.push_back(correlations_table(matrix));
        json["correlations"] = to_json(matrix);
    }

    // Regressions: PV then load, both from the weather candidates.
    nlohmann::json regressions = nlohmann::json::object();
    for (const char* response : {"pv_kw", "load_kw"}) {
        if (!d.has_variable(response)) continue;
        append_regression_sections(rep, regressions, d, response, default_candidates(d),
                                   opt.p_enter);
    }
    json["regressions"] = regressions;

    emit(opt, "report", rep, json);
    return kExitOk;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Statistical analysis of green-building energy time series"};
    app.require_subcommand(1);
    app.set_config("--config");

    Options opt;
    app.add_option("--input", opt.input, "Input CSV file")->configurable(true);
    app.add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->configurable(true);
    app.add_option("--output-dir", opt.output_dir, "Write output files here instead of stdout")
        ->configurable(true);
    app.add_option("--outlier-rule", opt.outlier_rule, "Outlier rule: none or tukey:K")
        ->configurable(true);
    app.add_option("--filter", opt.filters, "Row filter, e.g. \"irradiance_wm2>0\" (repeatable)")
        ->configurable(true);
    app.add_option("--range", opt.ranges, "Range override var=lo,hi (repeatable)")
        ->configurable(true);
    app.add_option("--groups", opt.groups, "Group count for levene/anova")->configurable(true);
    app.add_option("--group-on", opt.group_on,
                   "Grouping key: 'index' for chronological blocks or a variable name")
        ->configurable(true);
    app.add_option("--group-scheme", opt.group_scheme,
                   "bins = equal-count rank bins, distinct = one group per value")
        ->check(CLI::IsMember({"bins", "distinct"}))
        ->configurable(true);
    app.add_option("--p-enter", opt.p_enter, "Stepwise probability-of-F-to-enter")
        ->configurable(true);

    auto* cmd_clean = app.add_subcommand("clean", "Clean a CSV and write the result");
    std::string output_csv;
    cmd_clean->add_option("--output", output_csv, "Cleaned CSV path (default cleaned.csv)");

    auto* cmd_describe = app.add_subcommand("describe", "Descriptive statistics per variable");
    cmd_describe->add_option("--variables", opt.variables, "Variables to summarize");
    cmd_describe->add_option("--bin-rule", opt.bin_rule, "Histogram bin rule")
        ->check(CLI::IsMember({"sturges", "fd"}));

    auto* cmd_correlate = app.add_subcommand("correlate", "Pearson correlation matrix");
    cmd_correlate->add_option("--variables", opt.variables, "Variables to correlate");

    auto* cmd_levene = app.add_subcommand("levene", "Homogeneity-of-variance tests");
    cmd_levene->add_option("--variables", opt.variables, "Variables to test");

    auto* cmd_anova = app.add_subcommand("anova", "One-way ANOVA over the grouping");
    cmd_anova->add_option("--variables", opt.variables, "Variables to test");

    auto* cmd_regress = app.add_subcommand("regress", "Forward-stepwise linear regression");
    std::string save_model;
    cmd_regress->add_option("--response", opt.response, "Response variable");
    cmd_regress->add_option("--candidates", opt.candidates, "Candidate predictors");
    cmd_regress->add_option("--save-model", save_model, "Write the final fit as JSON");

    auto* cmd_predict = app.add_subcommand("predict", "Evaluate a fitted or shipped model");
    std::string model_name;
    std::string model_file;
    std::vector<std::string> set_inputs;
    double in_irradiance = 0.0, in_temperature = 0.0, in_humidity = 0.0, in_wind = 0.0,
           in_dust = 0.0;
    cmd_predict->add_option("model", model_name, "Model name (pv_model_4, load_model_2)");
    cmd_predict->add_option("--model-file", model_file, "JSON model file from --save-model");
    auto* flag_irr = cmd_predict->add_option("--irradiance", in_irradiance, "W/m2");
    auto* flag_temp = cmd_predict->add_option("--temperature", in_temperature, "deg C");
    auto* flag_rh = cmd_predict->add_option("--relative-humidity", in_humidity, "%");
    auto* flag_wind = cmd_predict->add_option("--wind-speed", in_wind, "km/h");
    auto* flag_dust = cmd_predict->add_option("--dust", in_dust, "mg/m3");
    cmd_predict->add_option("--set", set_inputs, "Extra input name=value (repeatable)");

    auto* cmd_report = app.add_subcommand("report", "Full analysis report, all sections");
    cmd_report->add_option("--variables", opt.variables, "Variables to include");

    // Let global options appear after the subcommand name.
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_clean->parsed()) return run_clean(opt, output_csv);
        if (cmd_describe->parsed()) return run_describe(opt);
        if (cmd_correlate->parsed()) return run_correlate(opt);
        if (cmd_levene->parsed()) return run_levene(opt);
        if (cmd_anova->parsed()) return run_anova(opt);
        if (cmd_regress->parsed()) return run_regress(opt, save_model);
        if (cmd_predict->parsed()) {
            std::map<std::string, double> inputs;
            if (*flag_irr) inputs["irradiance_wm2"] = in_irradiance;
            if (*flag_temp) inputs["temperature_c"] = in_temperature;
            if (*flag_rh) inputs["relative_humidity_pct"] = in_humidity;
            if (*flag_wind) inputs["wind_speed_kmh"] = in_wind;
            if (*flag_dust) inputs["dust_mgm3"] = in_dust;
            if (model_name.empty() && model_file.empty()) {
                throw ValidationError("predict requires a model name or --model-file");
            }
            return run_predict(opt, model_name, model_file, inputs, set_inputs);
        }
        if (cmd_report->parsed()) return run_report(opt);
    } catch (const EmptyDataset& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitEmpty;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAnalysis;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAnalysis;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return dispatch(argc, argv); }
