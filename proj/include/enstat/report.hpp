#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "enstat/dataset.hpp"
#include "enstat/descriptive.hpp"
#include "enstat/inference.hpp"
#include "enstat/regression.hpp"

namespace enstat {

/// One titled table with optional footnotes; cells are preformatted text.
struct Table {
    std::string title;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> footnotes;
};

struct Report {
    std::vector<Table> sections;
};

/// Fixed-decimal rendering; negative zero normalizes to zero.
std::string fmt_fixed(double v, int decimals);

/// SPSS style for statistics bounded by 1: the leading zero is dropped, so
/// 0.756 renders ".756" and p < 5e-4 renders ".000".
std::string fmt_bounded(double v, int decimals);

std::string significance_stars(Significance flag);

/// Deterministic plain-text rendering; identical input yields identical
/// bytes.
std::string render_text(const Report& report);

// Table builders (text path).
Table cleaning_table(const CleaningReport& report);
Table descriptives_table(const std::vector<std::string>& variables,
                         const std::vector<DescriptiveSummary>& summaries);
Table histogram_table(const std::string& variable, const Histogram& histogram);
Table boxplot_table(const std::string& variable, const BoxplotStats& stats);
Table correlations_table(const CorrelationMatrix& matrix);
Table levene_table(const std::vector<std::string>& variables,
                   const std::vector<std::vector<LeveneResult>>& results);
Table anova_table(const std::vector<std::string>& variables,
                  const std::vector<AnovaResult>& results);
Table model_summary_table(const std::string& response, const StepwiseTrace& trace);
Table coefficients_table(const std::string& response, const std::vector<OlsFit>& step_fits);
Table residual_stats_table(const std::string& response, const ResidualStats& stats);
Table excluded_variables_table(const std::string& response, const StepwiseTrace& trace);

// JSON builders (machine-readable path; raw numbers, no text rounding).
nlohmann::json to_json(const CleaningReport& report);
nlohmann::json to_json(const DescriptiveSummary& summary);
nlohmann::json to_json(const Histogram& histogram);
nlohmann::json to_json(const BoxplotStats& stats);
nlohmann::json to_json(const CorrelationMatrix& matrix);
nlohmann::json to_json(const LeveneResult& result);
nlohmann::json to_json(const AnovaResult& result);
nlohmann::json to_json(const OlsFit& fit);
nlohmann::json to_json(const ModelSummaryRow& row);
nlohmann::json to_json(const StepwiseTrace& trace);
nlohmann::json to_json(const ResidualStats& stats);

}  // namespace enstat
