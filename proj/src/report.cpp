#include "enstat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace enstat {

namespace {

const char* kVariantLabels[] = {
    "Based on Mean",
    "Based on Median",
    "Based on Median and with adjusted df",
    "Based on trimmed mean",
};

std::string fmt_int(std::size_t v) { return std::to_string(v); }

std::string fmt_df2(double df2) {
    // Integral degrees of freedom print without decimals, Satterthwaite-
    // adjusted ones with three.
    if (df2 == std::floor(df2)) return fmt_fixed(df2, 0);
    return fmt_fixed(df2, 3);
}

}  // namespace

std::string fmt_fixed(double v, int decimals) {
    if (std::isnan(v)) return "—";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string out = buf;
    if (out.find_first_not_of("-0.") == std::string::npos && out[0] == '-') {
        out.erase(0, 1);  // -0.000 -> 0.000
    }
    return out;
}

std::string fmt_bounded(double v, int decimals) {
    std::string out = fmt_fixed(v, decimals);
    if (out.rfind("0.", 0) == 0) {
        out.erase(0, 1);
    } else if (out.rfind("-0.", 0) == 0) {
        out.erase(1, 1);
    }
    return out;
}

std::string significance_stars(Significance flag) {
    switch (flag) {
        case Significance::p_lt_01: return "**";
        case Significance::p_lt_05: return "*";
        case Significance::none: return "";
    }
    return "";
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    for (const auto& table : report.sections) {
        out << table.title << '\n';

        std::vector<std::size_t> widths(table.headers.size(), 0);
        for (std::size_t c = 0; c < table.headers.size(); ++c) {
            widths[c] = table.headers[c].size();
        }
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c) {
                widths[c] = std::max(widths[c], row[c].size());
            }
        }

        auto emit_row = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < widths.size(); ++c) {
                const std::string& cell = c < row.size() ? row[c] : std::string();
                if (c > 0) out << "  ";
                if (c == 0) {
                    out << cell << std::string(widths[c] - cell.size(), ' ');
                } else {
                    out << std::string(widths[c] - cell.size(), ' ') << cell;
                }
            }
            out << '\n';
        };

        emit_row(table.headers);
        std::size_t total = 0;
        for (std::size_t c = 0; c < widths.size(); ++c) total += widths[c] + (c > 0 ? 2 : 0);
        out << std::string(total, '-') << '\n';
        for (const auto& row : table.rows) emit_row(row);
        for (const auto& note : table.footnotes) out << note << '\n';
        out << '\n';
    }
    return out.str();
}

Table cleaning_table(const CleaningReport& report) {
    Table t;
    t.title = "Case Processing Summary";
    t.headers = {"Stage", "Rows"};
    t.rows = {
        {"Rows in", fmt_int(report.rows_in)},
        {"Dropped: missing values", fmt_int(report.dropped_missing)},
        {"Dropped: out of range", fmt_int(report.dropped_out_of_range)},
        {"Dropped: outliers", fmt_int(report.dropped_outlier)},
        {"Rows out", fmt_int(report.rows_out)},
    };
    for (const auto& [name, counts] : report.per_variable) {
        if (counts.missing_cells == 0 && counts.out_of_range_cells == 0 &&
            counts.outlier_cells == 0) {
            continue;
        }
        t.footnotes.push_back(name + ": " + fmt_int(counts.missing_cells) + " missing, " +
                              fmt_int(counts.out_of_range_cells) + " out of range, " +
                              fmt_int(counts.outlier_cells) + " outlier cells");
    }
    if (report.empty_result) {
        t.footnotes.push_back("Warning: cleaning removed every row.");
    }
    return t;
}

Table descriptives_table(const std::vector<std::string>& variables,
                         const std::vector<DescriptiveSummary>& summaries) {
    Table t;
    t.title = "Descriptive Statistics";
    t.headers = {"Statistic"};
    for (const auto& name : variables) t.headers.push_back(name);

    const std::vector<std::string> labels = {
        "N Valid",        "Missing",      "Mean",     "Std. Error of Mean",
        "Median",         "Mode",         "Std. Deviation", "Variance",
        "Skewness",       "Std. Error of Skewness", "Range", "Minimum",
        "Maximum",        "Trimmed Mean",
    };
    for (const auto& label : labels) t.rows.push_back({label});

    for (const auto& s : summaries) {
        t.rows[0].push_back(fmt_int(s.n));
        t.rows[1].push_back(fmt_int(s.n_missing));
        t.rows[2].push_back(fmt_fixed(s.mean, 4));
        t.rows[3].push_back(fmt_fixed(s.se_mean, 4));
        t.rows[4].push_back(fmt_fixed(s.median, 4));
        t.rows[5].push_back(fmt_fixed(s.mode, 4));
        t.rows[6].push_back(fmt_fixed(s.sd, 4));
        t.rows[7].push_back(fmt_fixed(s.variance, 3));
        t.rows[8].push_back(s.skewness ? fmt_bounded(*s.skewness, 3) : "—");
        t.rows[9].push_back(fmt_fixed(s.se_skewness, 3));
        t.rows[10].push_back(fmt_fixed(s.range, 2));
        t.rows[11].push_back(fmt_fixed(s.min, 2));
        t.rows[12].push_back(fmt_fixed(s.max, 2));
        t.rows[13].push_back(fmt_fixed(s.trimmed_mean, 4));
    }
    return t;
}

Table histogram_table(const std::string& variable, const Histogram& histogram) {
    Table t;
    t.title = "Histogram: " + variable;
    t.headers = {"Bin", "From", "To", "Count"};
    for (std::size_t i = 0; i + 1 < histogram.bin_edges.size(); ++i) {
        t.rows.push_back({fmt_int(i + 1), fmt_fixed(histogram.bin_edges[i], 4),
                          fmt_fixed(histogram.bin_edges[i + 1], 4),
                          fmt_int(histogram.counts[i])});
    }
    if (histogram.overlay) {
        t.footnotes.push_back("Normal overlay: mean " + fmt_fixed(histogram.overlay->mean, 4) +
                              ", sd " + fmt_fixed(histogram.overlay->sd, 4));
    }
    return t;
}

Table boxplot_table(const std::string& variable, const BoxplotStats& stats) {
    Table t;
    t.title = "Boxplot: " + variable;
    t.headers = {"Statistic", "Value"};
    t.rows = {
        {"Q1", fmt_fixed(stats.q1, 4)},
        {"Median", fmt_fixed(stats.median, 4)},
        {"Q3", fmt_fixed(stats.q3, 4)},
        {"IQR", fmt_fixed(stats.iqr, 4)},
        {"Whisker low", fmt_fixed(stats.whisker_lo, 4)},
        {"Whisker high", fmt_fixed(stats.whisker_hi, 4)},
        {"Outliers", fmt_int(stats.outliers.size())},
        {"Extremes", fmt_int(stats.extremes.size())},
    };
    return t;
}

Table correlations_table(const CorrelationMatrix& matrix) {
    Table t;
    t.title = "Correlations";
    t.headers = {"", ""};
    for (const auto& name : matrix.variables) t.headers.push_back(name);

    bool any_05 = false;
    bool any_01 = false;
    for (std::size_t i = 0; i < matrix.variables.size(); ++i) {
        std::vector<std::string> r_row = {matrix.variables[i], "Pearson Correlation"};
        std::vector<std::string> p_row = {"", "Sig. (2-tailed)"};
        std::vector<std::string> n_row = {"", "N"};
        for (std::size_t j = 0; j < matrix.variables.size(); ++j) {
            const auto& cell = matrix.cells[i][j];
            if (i == j) {
                r_row.push_back("1");
                p_row.push_back("");
            } else {
                r_row.push_back(fmt_bounded(cell.r, 3) + significance_stars(cell.flag));
                p_row.push_back(fmt_bounded(*cell.p_two_tailed, 3));
                if (cell.flag == Significance::p_lt_01) any_01 = true;
                if (cell.flag == Significance::p_lt_05) any_05 = true;
            }
            n_row.push_back(fmt_int(cell.n));
        }
        t.rows.push_back(r_row);
        t.rows.push_back(p_row);
        t.rows.push_back(n_row);
    }
    if (any_01) {
        t.footnotes.push_back("** Correlation is significant at the 0.01 level (2-tailed).");
    }
    if (any_05) {
        t.footnotes.push_back("* Correlation is significant at the 0.05 level (2-tailed).");
    }
    return t;
}

Table levene_table(const std::vector<std::string>& variables,
                   const std::vector<std::vector<LeveneResult>>& results) {
    Table t;
    t.title = "Test of Homogeneity of Variances";
    t.headers = {"Variable", "", "Levene Statistic", "df1", "df2", "Sig."};
    for (std::size_t v = 0; v < variables.size(); ++v) {
        for (std::size_t i = 0; i < results[v].size(); ++i) {
            const auto& r = results[v][i];
            t.rows.push_back({i == 0 ? variables[v] : "",
                              kVariantLabels[static_cast<int>(r.variant)], fmt_fixed(r.w, 3),
                              fmt_int(r.df1), fmt_df2(r.df2), fmt_bounded(r.p, 3)});
        }
    }
    return t;
}

Table anova_table(const std::vector<std::string>& variables,
                  const std::vector<AnovaResult>& results) {
    Table t;
    t.title = "ANOVA";
    t.headers = {"Variable", "Sum of Squares (Between)", "Sum of Squares (Within)",
                 "df1",      "df2",                      "F",
                 "Sig."};
    for (std::size_t v = 0; v < variables.size(); ++v) {
        const auto& r = results[v];
        t.rows.push_back({variables[v], fmt_fixed(r.ss_between, 3), fmt_fixed(r.ss_within, 3),
                          fmt_int(r.df1), fmt_int(r.df2), fmt_fixed(r.f, 3),
                          fmt_bounded(r.p, 3)});
    }
    return t;
}

Table model_summary_table(const std::string& response, const StepwiseTrace& trace) {
    Table t;
    t.title = "Model Summary (" + response + ")";
    t.headers = {"Model", "R",        "R Square", "Adjusted R Square",
                 "Std. Error of the Estimate", "R Square Change", "F Change",
                 "df1",   "df2",      "Sig. F Change"};
    std::vector<std::string> entered;
    for (const auto& row : trace.rows) {
        entered.push_back(row.entered);
        t.rows.push_back({fmt_int(row.step), fmt_bounded(row.r, 3), fmt_bounded(row.r2, 3),
                          fmt_bounded(row.adj_r2, 3), fmt_fixed(row.see, 6),
                          fmt_bounded(row.r2_change, 3), fmt_fixed(row.f_change, 3),
                          fmt_int(row.df1), fmt_int(row.df2),
                          fmt_bounded(row.sig_f_change, 3)});
        std::string note = std::to_string(row.step) + ". Predictors: (Constant)";
        for (const auto& name : entered) note += ", " + name;
        t.footnotes.push_back(note);
    }
    t.footnotes.push_back("Dependent Variable: " + response);
    return t;
}

Table coefficients_table(const std::string& response, const std::vector<OlsFit>& step_fits) {
    Table t;
    t.title = "Coefficients (" + response + ")";
    t.headers = {"Model", "", "B", "Std. Error", "Beta", "t", "Sig."};
    for (std::size_t s = 0; s < step_fits.size(); ++s) {
        const auto& fit = step_fits[s];
        t.rows.push_back({fmt_int(s + 1), "(Constant)", fmt_fixed(fit.b[0], 3),
                          fmt_fixed(fit.se_b[0], 3), "", fmt_fixed(fit.t_stats[0], 3),
                          fmt_bounded(fit.p_values[0], 3)});
        for (std::size_t j = 0; j < fit.predictors.size(); ++j) {
            t.rows.push_back({"", fit.predictors[j], fmt_fixed(fit.b[j + 1], 3),
                              fmt_fixed(fit.se_b[j + 1], 3), fmt_bounded(fit.beta[j], 3),
                              fmt_fixed(fit.t_stats[j + 1], 3),
                              fmt_bounded(fit.p_values[j + 1], 3)});
        }
    }
    t.footnotes.push_back("Dependent Variable: " + response);
    return t;
}

Table residual_stats_table(const std::string& response, const ResidualStats& stats) {
    Table t;
    t.title = "Residuals Statistics (" + response + ")";
    t.headers = {"", "Minimum", "Maximum", "Mean", "Std. Deviation", "N"};
    auto row = [&](const char* label, const ResidualStats::Block& b, int decimals) {
        t.rows.push_back({label, fmt_fixed(b.min, decimals), fmt_fixed(b.max, decimals),
                          fmt_fixed(b.mean, decimals), fmt_fixed(b.sd, decimals),
                          fmt_int(stats.n)});
    };
    row("Predicted Value", stats.predicted, 6);
    row("Residual", stats.residual, 6);
    row("Std. Predicted Value", stats.std_predicted, 3);
    row("Std. Residual", stats.std_residual, 3);
    t.footnotes.push_back("Dependent Variable: " + response);
    return t;
}

Table excluded_variables_table(const std::string& response, const StepwiseTrace& trace) {
    Table t;
    t.title = "Excluded Variables (" + response + ")";
    t.headers = {"Variable", "Sig. to Enter"};
    for (const auto& [name, p] : trace.excluded) {
        t.rows.push_back({name, fmt_bounded(p, 3)});
    }
    t.footnotes.push_back("Dependent Variable: " + response);
    return t;
}

namespace {

nlohmann::json json_or_null(double v) {
    if (std::isnan(v) || std::isinf(v)) return nullptr;
    return v;
}

nlohmann::json block_json(const ResidualStats::Block& b) {
    return {{"min", json_or_null(b.min)},
            {"max", json_or_null(b.max)},
            {"mean", json_or_null(b.mean)},
            {"sd", json_or_null(b.sd)}};
}

}  // namespace

nlohmann::json to_json(const CleaningReport& report) {
    nlohmann::json per_variable = nlohmann::json::object();
    for (const auto& [name, counts] : report.per_variable) {
        per_variable[name] = {{"missing_cells", counts.missing_cells},
                              {"out_of_range_cells", counts.out_of_range_cells},
                              {"outlier_cells", counts.outlier_cells}};
    }
    return {{"rows_in", report.rows_in},
            {"rows_out", report.rows_out},
            {"dropped_missing", report.dropped_missing},
            {"dropped_out_of_range", report.dropped_out_of_range},
            {"dropped_outlier", report.dropped_outlier},
            {"per_variable", per_variable},
            {"empty_result", report.empty_result}};
}

nlohmann::json to_json(const DescriptiveSummary& s) {
    return {{"n", s.n},
            {"n_missing", s.n_missing},
            {"mean", s.mean},
            {"se_mean", s.se_mean},
            {"median", s.median},
            {"mode", s.mode},
            {"sd", s.sd},
            {"variance", s.variance},
            {"skewness", s.skewness ? nlohmann::json(*s.skewness) : nlohmann::json(nullptr)},
            {"se_skewness", json_or_null(s.se_skewness)},
            {"range", s.range},
            {"min", s.min},
            {"max", s.max},
            {"trimmed_mean", s.trimmed_mean}};
}

nlohmann::json to_json(const Histogram& h) {
    nlohmann::json j = {{"bin_edges", h.bin_edges}, {"counts", h.counts}};
    j["overlay"] = h.overlay ? nlohmann::json{{"mean", h.overlay->mean}, {"sd", h.overlay->sd}}
                             : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const BoxplotStats& b) {
    auto points = [](const std::vector<std::pair<std::size_t, double>>& items) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [row, value] : items) arr.push_back({{"row", row}, {"value", value}});
        return arr;
    };
    return {{"q1", b.q1},
            {"median", b.median},
            {"q3", b.q3},
            {"iqr", b.iqr},
            {"whisker_lo", b.whisker_lo},
            {"whisker_hi", b.whisker_hi},
            {"outliers", points(b.outliers)},
            {"extremes", points(b.extremes)}};
}

nlohmann::json to_json(const CorrelationMatrix& matrix) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < matrix.variables.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < matrix.variables.size(); ++j) {
            const auto& cell = matrix.cells[i][j];
            row.push_back({{"r", cell.r},
                           {"n", cell.n},
                           {"p_two_tailed", cell.p_two_tailed
                                                ? nlohmann::json(*cell.p_two_tailed)
                                                : nlohmann::json(nullptr)},
                           {"stars", significance_stars(cell.flag)}});
        }
        cells.push_back(row);
    }
    return {{"variables", matrix.variables}, {"cells", cells}};
}

nlohmann::json to_json(const LeveneResult& r) {
    static const char* kVariantKeys[] = {"mean", "median", "median_adjusted_df", "trimmed_mean"};
    return {{"variant", kVariantKeys[static_cast<int>(r.variant)]},
            {"w", json_or_null(r.w)},
            {"df1", r.df1},
            {"df2", r.df2},
            {"p", r.p}};
}

nlohmann::json to_json(const AnovaResult& r) {
    return {{"f", json_or_null(r.f)}, {"df1", r.df1},
            {"df2", r.df2},           {"p", r.p},
            {"ss_between", r.ss_between}, {"ss_within", r.ss_within}};
}

nlohmann::json to_json(const OlsFit& fit) {
    return {{"response", fit.response}, {"predictors", fit.predictors},
            {"b", fit.b},               {"se_b", fit.se_b},
            {"beta", fit.beta},         {"t", fit.t_stats},
            {"p", fit.p_values},        {"r", fit.r},
            {"r2", fit.r2},             {"adj_r2", fit.adj_r2},
            {"see", fit.see},           {"n", fit.n}};
}

nlohmann::json to_json(const ModelSummaryRow& row) {
    return {{"step", row.step},
            {"r", row.r},
            {"r2", row.r2},
            {"adj_r2", row.adj_r2},
            {"see", row.see},
            {"r2_change", row.r2_change},
            {"f_change", json_or_null(row.f_change)},
            {"df1", row.df1},
            {"df2", row.df2},
            {"sig_f_change", row.sig_f_change},
            {"entered", row.entered}};
}

nlohmann::json to_json(const StepwiseTrace& trace) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : trace.rows) rows.push_back(to_json(row));
    nlohmann::json excluded = nlohmann::json::array();
    for (const auto& [name, p] : trace.excluded) {
        excluded.push_back({{"variable", name}, {"sig_to_enter", p}});
    }
    return {{"steps", rows},
            {"final", trace.final ? to_json(*trace.final) : nlohmann::json(nullptr)},
            {"excluded", excluded}};
}

nlohmann::json to_json(const ResidualStats& stats) {
    return {{"predicted", block_json(stats.predicted)},
            {"residual", block_json(stats.residual)},
            {"std_predicted", block_json(stats.std_predicted)},
            {"std_residual", block_json(stats.std_residual)},
            {"n", stats.n}};
}

}  // namespace enstat
