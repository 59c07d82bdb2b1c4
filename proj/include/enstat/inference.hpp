#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "enstat/dataset.hpp"

namespace enstat {

enum class Significance { none, p_lt_05, p_lt_01 };

struct CorrelationResult {
    double r = 0.0;
    std::size_t n = 0;
    std::optional<double> p_two_tailed;  // absent on the matrix diagonal
    Significance flag = Significance::none;
};

struct CorrelationMatrix {
    std::vector<std::string> variables;
    std::vector<std::vector<CorrelationResult>> cells;  // symmetric, diagonal r = 1
};

struct GroupedSeries {
    std::size_t k = 0;
    std::vector<std::pair<std::string, std::vector<double>>> groups;
    std::size_t n_total = 0;
};

/// by_column groups a variable by the distinct values of another column;
/// equal_count_bins splits it into k rank-quantile bins of the `on` column
/// (ties go to the lower bin), or into k chronological blocks when `on` is
/// empty.
struct GroupingScheme {
    enum class Kind { by_column, equal_count_bins };
    Kind kind = Kind::equal_count_bins;
    std::string on;  // empty means row index
    std::size_t k = 25;

    static GroupingScheme by_column(std::string column) {
        return {Kind::by_column, std::move(column), 0};
    }
    static GroupingScheme equal_count_bins(std::string on, std::size_t k) {
        return {Kind::equal_count_bins, std::move(on), k};
    }
};

enum class LeveneVariant { mean, median, median_adjusted_df, trimmed_mean };

struct LeveneResult {
    LeveneVariant variant = LeveneVariant::mean;
    double w = 0.0;
    std::size_t df1 = 0;
    double df2 = 0.0;  // non-integer only for median_adjusted_df
    double p = 1.0;
};

struct AnovaResult {
    double f = 0.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    double p = 1.0;
    double ss_between = 0.0;
    double ss_within = 0.0;
};

/// Pearson correlation with a two-tailed significance test on
/// t = r * sqrt((n-2)/(1-r^2)), df = n-2.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

CorrelationMatrix correlation_matrix(const Dataset& d, const std::vector<std::string>& variables,
                                     const std::optional<RowPredicate>& subset = std::nullopt);

GroupedSeries make_groups(const Dataset& d, const std::string& variable,
                          const GroupingScheme& scheme);

/// Homogeneity-of-variance test: one-way ANOVA on absolute deviations from a
/// per-group center (mean, median, or 5% trimmed mean).
LeveneResult levene(const GroupedSeries& g, LeveneVariant variant);

AnovaResult anova_oneway(const GroupedSeries& g);

}  // namespace enstat
