#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace enstat {

/// Full univariate summary in SPSS DESCRIPTIVES/EXAMINE semantics: sample
/// (n-1) variance, bias-adjusted G1 skewness, midpoint median.
struct DescriptiveSummary {
    std::size_t n = 0;
    std::size_t n_missing = 0;
    double mean = 0.0;
    double se_mean = 0.0;
    double median = 0.0;
    double mode = 0.0;
    double sd = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;  // absent for constant data
    double se_skewness = 0.0;        // NaN when n < 3
    double range = 0.0;
    double min = 0.0;
    double max = 0.0;
    double trimmed_mean = 0.0;  // symmetric 5% trim
};

struct NormalOverlay {
    double mean = 0.0;
    double sd = 0.0;
};

/// Equal-width histogram. Bins are right-open, the last bin is closed.
struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::optional<NormalOverlay> overlay;
};

enum class BinRule { sturges, freedman_diaconis };

/// Five-number boxplot summary with SPSS fence classification: values beyond
/// 1.5*IQR are outliers, beyond 3*IQR extremes. Indices refer to the input
/// order.
struct BoxplotStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    std::vector<std::pair<std::size_t, double>> outliers;
    std::vector<std::pair<std::size_t, double>> extremes;
};

DescriptiveSummary summarize(std::span<const double> values);

/// Mean after removing floor(n * fraction) values from each end, fraction in
/// [0, 0.25].
double trimmed_mean(std::span<const double> values, double fraction);

/// Most frequent value; ties resolved to the smallest candidate.
double mode(std::span<const double> values);

/// Weighted-average quantile at position (n+1)*p over the sorted values
/// (SPSS HAVERAGE, quantile type 6).
double quantile(std::span<const double> values, double p);

Histogram histogram(std::span<const double> values, std::size_t bins);
Histogram histogram(std::span<const double> values, BinRule rule);

BoxplotStats boxplot_stats(std::span<const double> values);

}  // namespace enstat
