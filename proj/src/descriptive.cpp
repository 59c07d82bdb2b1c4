#include "enstat/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "enstat/errors.hpp"

namespace enstat {

namespace {

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    return s;
}

double median_of_sorted(const std::vector<double>& s) {
    const std::size_t n = s.size();
    if (n % 2 == 0) return (s[n / 2 - 1] + s[n / 2]) / 2.0;
    return s[n / 2];
}

// Quantile at position (n+1)*p with linear interpolation, clamped to the
// data range.
double quantile_sorted(const std::vector<double>& s, double p) {
    const auto n = static_cast<double>(s.size());
    const double h = (n + 1.0) * p;
    if (h <= 1.0) return s.front();
    if (h >= n) return s.back();
    const auto lo = static_cast<std::size_t>(h);  // 1-based floor
    const double frac = h - static_cast<double>(lo);
    return s[lo - 1] + frac * (s[lo] - s[lo - 1]);
}

double trimmed_mean_sorted(const std::vector<double>& s, double fraction) {
    const auto k = static_cast<std::size_t>(
        std::floor(static_cast<double>(s.size()) * fraction));
    if (2 * k >= s.size()) {
        throw InsufficientDataError("trimmed_mean: no values remain after trimming");
    }
    double sum = 0.0;
    for (std::size_t i = k; i < s.size() - k; ++i) sum += s[i];
    return sum / static_cast<double>(s.size() - 2 * k);
}

}  // namespace

DescriptiveSummary summarize(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw InsufficientDataError("summarize requires at least 2 values, got " +
                                    std::to_string(n));
    }

    DescriptiveSummary s;
    s.n = n;
    s.mean = mean_of(values);

    double m2 = 0.0;  // central moments, 1/n denominators
    double m3 = 0.0;
    double ss = 0.0;  // sum of squared deviations
    for (double v : values) {
        const double d = v - s.mean;
        ss += d * d;
        m3 += d * d * d;
    }
    const auto nd = static_cast<double>(n);
    m2 = ss / nd;
    m3 /= nd;

    s.variance = ss / (nd - 1.0);
    s.sd = std::sqrt(s.variance);
    s.se_mean = s.sd / std::sqrt(nd);

    const auto sorted = sorted_copy(values);
    s.median = median_of_sorted(sorted);
    s.min = sorted.front();
    s.max = sorted.back();
    s.range = s.max - s.min;
    s.mode = mode(values);
    s.trimmed_mean = trimmed_mean_sorted(sorted, 0.05);

    if (n >= 3) {
        if (s.sd > 0.0) {
            // Bias-adjusted skewness G1 = sqrt(n(n-1))/(n-2) * m3 / m2^(3/2).
            s.skewness = std::sqrt(nd * (nd - 1.0)) / (nd - 2.0) * m3 / std::pow(m2, 1.5);
        }
        s.se_skewness =
            std::sqrt(6.0 * nd * (nd - 1.0) / ((nd - 2.0) * (nd + 1.0) * (nd + 3.0)));
    } else {
        s.se_skewness = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

double trimmed_mean(std::span<const double> values, double fraction) {
    if (values.empty()) {
        throw InsufficientDataError("trimmed_mean requires at least 1 value");
    }
    if (!(fraction >= 0.0 && fraction <= 0.25)) {
        throw DomainError("trimmed_mean fraction must lie in [0, 0.25], got " +
                          std::to_string(fraction));
    }
    return trimmed_mean_sorted(sorted_copy(values), fraction);
}

double mode(std::span<const double> values) {
    if (values.empty()) {
        throw InsufficientDataError("mode requires at least 1 value");
    }
    std::map<double, std::size_t> freq;
    for (double v : values) ++freq[v];
    double best = freq.begin()->first;
    std::size_t best_count = freq.begin()->second;
    for (const auto& [value, count] : freq) {
        if (count > best_count) {  // ties keep the smaller key
            best = value;
            best_count = count;
        }
    }
    return best;
}

double quantile(std::span<const double> values, double p) {
    if (values.empty()) {
        throw InsufficientDataError("quantile requires at least 1 value");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("quantile requires p in [0, 1], got " + std::to_string(p));
    }
    return quantile_sorted(sorted_copy(values), p);
}

namespace {

Histogram histogram_impl(std::span<const double> values, std::size_t bins) {
    if (values.empty()) {
        throw InsufficientDataError("histogram requires at least 1 value");
    }
    if (bins == 0) {
        throw DomainError("histogram requires at least 1 bin");
    }

    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    double lo = *min_it;
    double hi = *max_it;

    Histogram h;
    if (lo == hi) {
        // Degenerate: all values equal, one unit-width bin centered on them.
        h.bin_edges = {lo - 0.5, lo + 0.5};
        h.counts = {values.size()};
    } else {
        const double width = (hi - lo) / static_cast<double>(bins);
        h.bin_edges.reserve(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i) {
            h.bin_edges.push_back(lo + width * static_cast<double>(i));
        }
        h.bin_edges.back() = hi;  // guard against rounding drift
        h.counts.assign(bins, 0);
        for (double v : values) {
            auto idx = static_cast<std::size_t>((v - lo) / width);
            if (idx >= bins) idx = bins - 1;  // max value joins the last bin
            ++h.counts[idx];
        }
    }
    if (values.size() >= 2) {
        const auto s = summarize(values);
        h.overlay = NormalOverlay{s.mean, s.sd};
    }
    return h;
}

}  // namespace

Histogram histogram(std::span<const double> values, std::size_t bins) {
    return histogram_impl(values, bins);
}

Histogram histogram(std::span<const double> values, BinRule rule) {
    if (values.empty()) {
        throw InsufficientDataError("histogram requires at least 1 value");
    }
    const auto n = static_cast<double>(values.size());
    std::size_t bins = 1;
    switch (rule) {
        case BinRule::sturges:
            bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
            break;
        case BinRule::freedman_diaconis: {
            const auto sorted = sorted_copy(values);
            const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
            const double range = sorted.back() - sorted.front();
            if (iqr <= 0.0 || range <= 0.0) {
                bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
            } else {
                const double width = 2.0 * iqr / std::cbrt(n);
                bins = static_cast<std::size_t>(std::ceil(range / width));
            }
            break;
        }
    }
    return histogram_impl(values, std::max<std::size_t>(bins, 1));
}

BoxplotStats boxplot_stats(std::span<const double> values) {
    if (values.size() < 4) {
        throw InsufficientDataError("boxplot_stats requires at least 4 values, got " +
                                    std::to_string(values.size()));
    }
    const auto sorted = sorted_copy(values);

    BoxplotStats b;
    b.q1 = quantile_sorted(sorted, 0.25);
    b.median = quantile_sorted(sorted, 0.50);
    b.q3 = quantile_sorted(sorted, 0.75);
    b.iqr = b.q3 - b.q1;

    const double outlier_lo = b.q1 - 1.5 * b.iqr;
    const double outlier_hi = b.q3 + 1.5 * b.iqr;
    const double extreme_lo = b.q1 - 3.0 * b.iqr;
    const double extreme_hi = b.q3 + 3.0 * b.iqr;

    b.whisker_lo = std::numeric_limits<double>::infinity();
    b.whisker_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (v < outlier_lo || v > outlier_hi) {
            b.outliers.emplace_back(i, v);
            if (v < extreme_lo || v > extreme_hi) b.extremes.emplace_back(i, v);
        } else {
            b.whisker_lo = std::min(b.whisker_lo, v);
            b.whisker_hi = std::max(b.whisker_hi, v);
        }
    }
    return b;
}

}  // namespace enstat
