#include "enstat/inference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "enstat/descriptive.hpp"
#include "enstat/errors.hpp"
#include "enstat/special_functions.hpp"

namespace enstat {

namespace {

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 0) return (values[n / 2 - 1] + values[n / 2]) / 2.0;
    return values[n / 2];
}

Significance flag_for(double p) {
    if (p < 0.01) return Significance::p_lt_01;
    if (p < 0.05) return Significance::p_lt_05;
    return Significance::none;
}

std::string label_for_value(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError("pearson requires equal-length inputs");
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw InsufficientDataError("pearson requires n >= 3, got " + std::to_string(n));
    }

    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw AnalysisError("correlation undefined: an input has zero variance");
    }

    CorrelationResult result;
    result.n = n;
    result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (std::fabs(result.r) == 1.0) {
        result.p_two_tailed = 0.0;
    } else {
        const auto df = static_cast<double>(n - 2);
        const double t = result.r * std::sqrt(df / (1.0 - result.r * result.r));
        result.p_two_tailed = t_two_tailed_p(t, df).value;
    }
    result.flag = flag_for(*result.p_two_tailed);
    return result;
}

CorrelationMatrix correlation_matrix(const Dataset& d, const std::vector<std::string>& variables,
                                     const std::optional<RowPredicate>& subset) {
    if (variables.size() < 2) {
        throw ValidationError("correlation matrix requires at least 2 variables");
    }
    const Dataset* source = &d;
    std::optional<Dataset> filtered;
    if (subset) {
        filtered = filter_rows(d, *subset);
        source = &*filtered;
    }
    if (source->row_count() < 3) {
        throw InsufficientDataError("correlation subset leaves fewer than 3 rows");
    }

    std::vector<std::vector<double>> columns;
    columns.reserve(variables.size());
    for (const auto& name : variables) columns.push_back(source->values(name));

    const std::size_t m = variables.size();
    CorrelationMatrix matrix;
    matrix.variables = variables;
    matrix.cells.assign(m, std::vector<CorrelationResult>(m));
    for (std::size_t i = 0; i < m; ++i) {
        matrix.cells[i][i].r = 1.0;
        matrix.cells[i][i].n = source->row_count();
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto cell = pearson(columns[i], columns[j]);
            matrix.cells[i][j] = cell;
            matrix.cells[j][i] = cell;
        }
    }
    return matrix;
}

GroupedSeries make_groups(const Dataset& d, const std::string& variable,
                          const GroupingScheme& scheme) {
    const auto values = d.values(variable);
    const std::size_t n = values.size();

    GroupedSeries out;
    if (scheme.kind == GroupingScheme::Kind::by_column) {
        const auto keys = d.values(scheme.on);
        std::map<double, std::vector<double>> buckets;
        for (std::size_t r = 0; r < n; ++r) buckets[keys[r]].push_back(values[r]);
        for (auto& [key, members] : buckets) {
            out.groups.emplace_back(label_for_value(key), std::move(members));
        }
    } else {
        const std::size_t k = scheme.k;
        if (k < 2) {
            throw GroupingError("equal_count_bins requires k >= 2, got " + std::to_string(k));
        }
        if (k > n) {
            throw GroupingError("equal_count_bins: k exceeds the row count");
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::vector<std::vector<double>> bins(k);
        if (scheme.on.empty()) {
            // Chronological blocks over the row index.
            for (std::size_t j = 0; j < n; ++j) {
                bins[j * k / n].push_back(values[order[j]]);
            }
        } else {
            const auto keys = d.values(scheme.on);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return keys[a] < keys[b];
            });
            // Rank quantiles; a run of tied keys takes the bin of its first rank.
            std::size_t run_start = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j > 0 && keys[order[j]] != keys[order[j - 1]]) run_start = j;
                bins[run_start * k / n].push_back(values[order[j]]);
            }
        }
        for (std::size_t b = 0; b < k; ++b) {
            out.groups.emplace_back(std::to_string(b + 1), std::move(bins[b]));
        }
    }

    out.k = out.groups.size();
    for (const auto& [label, members] : out.groups) {
        if (members.empty()) {
            throw GroupingError("group '" + label + "' is empty");
        }
        out.n_total += members.size();
    }
    if (out.k < 2) {
        throw GroupingError("grouping produced fewer than 2 groups");
    }
    return out;
}

LeveneResult levene(const GroupedSeries& g, LeveneVariant variant) {
    if (g.k < 2) {
        throw GroupingError("levene requires at least 2 groups");
    }
    const std::size_t k = g.k;
    const std::size_t n = g.n_total;
    if (n <= k) {
        throw InsufficientDataError("levene requires at least one group of size >= 2");
    }

    // Absolute deviations from the per-group center.
    std::vector<std::vector<double>> z(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& members = g.groups[i].second;
        double center = 0.0;
        switch (variant) {
            case LeveneVariant::mean:
                center = mean_of(members);
                break;
            case LeveneVariant::median:
            case LeveneVariant::median_adjusted_df:
                center = median_of(members);
                break;
            case LeveneVariant::trimmed_mean:
                center = trimmed_mean(members, 0.05);
                break;
        }
        z[i].reserve(members.size());
        for (double v : members) z[i].push_back(std::fabs(v - center));
    }

    std::vector<double> z_group_mean(k);
    double z_grand_mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        z_group_mean[i] = mean_of(z[i]);
        z_grand_mean += z_group_mean[i] * static_cast<double>(z[i].size());
    }
    z_grand_mean /= static_cast<double>(n);

    double between = 0.0;
    double within = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double db = z_group_mean[i] - z_grand_mean;
        between += static_cast<double>(z[i].size()) * db * db;
        for (double v : z[i]) {
            const double dw = v - z_group_mean[i];
            within += dw * dw;
        }
    }

    LeveneResult result;
    result.variant = variant;
    result.df1 = k - 1;
    result.df2 = static_cast<double>(n - k);

    if (variant == LeveneVariant::median_adjusted_df) {
        // Satterthwaite correction with Brown-Forsythe weights
        // c_i = (1 - n_i/N) * s_i^2 over the per-group variances of z:
        // df2 = (sum c_i)^2 / sum(c_i^2 / (n_i - 1)).
        double c_sum = 0.0;
        double c_sq = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const auto ni = static_cast<double>(z[i].size());
            if (ni < 2.0) continue;  // singleton groups carry no variance information
            double ssd = 0.0;
            for (double v : z[i]) {
                const double dz = v - z_group_mean[i];
                ssd += dz * dz;
            }
            const double ci = (1.0 - ni / static_cast<double>(n)) * (ssd / (ni - 1.0));
            c_sum += ci;
            c_sq += ci * ci / (ni - 1.0);
        }
        if (c_sq > 0.0) {
            result.df2 = std::min(c_sum * c_sum / c_sq, static_cast<double>(n - k));
        }
    }

    if (within == 0.0) {
        if (between == 0.0) {
            result.w = 0.0;
            result.p = 1.0;
        } else {
            result.w = std::numeric_limits<double>::infinity();
            result.p = 0.0;
        }
        return result;
    }

    result.w = (static_cast<double>(n - k) / static_cast<double>(k - 1)) * between / within;
    result.p = f_upper_p(result.w, static_cast<double>(result.df1), result.df2).value;
    return result;
}

AnovaResult anova_oneway(const GroupedSeries& g) {
    if (g.k < 2) {
        throw GroupingError("anova_oneway requires at least 2 groups");
    }
    const std::size_t k = g.k;
    const std::size_t n = g.n_total;
    if (n <= k) {
        throw InsufficientDataError("anova_oneway requires N - k >= 1");
    }

    double grand_sum = 0.0;
    for (const auto& [label, members] : g.groups) {
        for (double v : members) grand_sum += v;
    }
    const double grand_mean = grand_sum / static_cast<double>(n);

    AnovaResult result;
    result.df1 = k - 1;
    result.df2 = n - k;
    for (const auto& [label, members] : g.groups) {
        const double gm = mean_of(members);
        const double db = gm - grand_mean;
        result.ss_between += static_cast<double>(members.size()) * db * db;
        for (double v : members) {
            const double dw = v - gm;
            result.ss_within += dw * dw;
        }
    }

    if (result.ss_within == 0.0) {
        if (result.ss_between == 0.0) {
            result.f = 0.0;
            result.p = 1.0;
        } else {
            result.f = std::numeric_limits<double>::infinity();
            result.p = 0.0;
        }
        return result;
    }

    result.f = (result.ss_between / static_cast<double>(result.df1)) /
               (result.ss_within / static_cast<double>(result.df2));
    result.p = f_upper_p(result.f, static_cast<double>(result.df1),
                         static_cast<double>(result.df2))
                   .value;
    return result;
}

}  // namespace enstat
