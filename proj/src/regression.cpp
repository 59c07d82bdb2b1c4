#include "enstat/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "enstat/errors.hpp"
#include "enstat/special_functions.hpp"

namespace enstat {

namespace {

constexpr double kPivotTolerance = 1e-10;  // relative to the largest pivot

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_sd(const std::vector<double>& values) {
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - m;
        ss += d * d;
    }
    return std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));
}

// Least-squares solution of the column-major n x m system via Householder QR
// with column pivoting. On rank deficiency reports the first dependent
// column's original index.
struct QrSolution {
    std::vector<double> coefficients;     // original column order
    std::vector<double> inv_xtx_diag;     // diag of (X'X)^-1, original order
};

QrSolution qr_least_squares(std::vector<double> a, std::size_t n, std::size_t m,
                            std::vector<double> y,
                            const std::vector<std::string>& column_names) {
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> r_diag(m, 0.0);

    auto col = [&](std::size_t j) { return a.data() + j * n; };

    for (std::size_t kstep = 0; kstep < m; ++kstep) {
        // Pivot: the remaining column with the largest trailing norm.
        std::size_t best = kstep;
        double best_norm = -1.0;
        for (std::size_t j = kstep; j < m; ++j) {
            double norm = 0.0;
            const double* cj = col(j);
            for (std::size_t i = kstep; i < n; ++i) norm += cj[i] * cj[i];
            if (norm > best_norm) {
                best_norm = norm;
                best = j;
            }
        }
        if (best != kstep) {
            for (std::size_t i = 0; i < n; ++i) std::swap(col(kstep)[i], col(best)[i]);
            std::swap(perm[kstep], perm[best]);
        }

        double* ck = col(kstep);
        double norm = std::sqrt(best_norm);
        r_diag[kstep] = ck[kstep] >= 0.0 ? -norm : norm;

        const double threshold = kPivotTolerance * std::fabs(r_diag[0]);
        if (norm == 0.0 || std::fabs(r_diag[kstep]) <= threshold) {
            throw CollinearityError("design matrix is rank deficient: column '" +
                                    column_names[perm[kstep]] +
                                    "' is linearly dependent on the others");
        }

        // Householder vector stored in place below the diagonal.
        ck[kstep] -= r_diag[kstep];
        double vnorm2 = 0.0;
        for (std::size_t i = kstep; i < n; ++i) vnorm2 += ck[i] * ck[i];

        auto apply = [&](double* target) {
            double dot = 0.0;
            for (std::size_t i = kstep; i < n; ++i) dot += ck[i] * target[i];
            const double scale = 2.0 * dot / vnorm2;
            for (std::size_t i = kstep; i < n; ++i) target[i] -= scale * ck[i];
        };
        for (std::size_t j = kstep + 1; j < m; ++j) apply(col(j));
        apply(y.data());
    }

    // Back substitution: R z = Q'y (R stored above the diagonal, r_diag on it).
    std::vector<double> z(m, 0.0);
    for (std::size_t j = m; j-- > 0;) {
        double sum = y[j];
        for (std::size_t l = j + 1; l < m; ++l) sum -= col(l)[j] * z[l];
        z[j] = sum / r_diag[j];
    }

    // R^-1 by columns, then diag of (X'X)^-1 = rows of R^-1 squared.
    std::vector<double> r_inv(m * m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t j = c + 1; j-- > 0;) {
            double sum = (j == c) ? 1.0 : 0.0;
            for (std::size_t l = j + 1; l <= c; ++l) sum -= col(l)[j] * r_inv[c * m + l];
            r_inv[c * m + j] = sum / r_diag[j];
        }
    }

    QrSolution solution;
    solution.coefficients.assign(m, 0.0);
    solution.inv_xtx_diag.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        solution.coefficients[perm[j]] = z[j];
        double row_norm2 = 0.0;
        for (std::size_t c = j; c < m; ++c) {
            const double v = r_inv[c * m + j];
            row_norm2 += v * v;
        }
        solution.inv_xtx_diag[perm[j]] = row_norm2;
    }
    return solution;
}

ResidualStats::Block block_of(const std::vector<double>& values) {
    ResidualStats::Block b;
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    b.min = *min_it;
    b.max = *max_it;
    b.mean = mean_of(values);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - b.mean;
        ss += d * d;
    }
    b.sd = std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));
    return b;
}

double evaluate_linear(double intercept,
                       const std::vector<std::pair<std::string, double>>& coefficients,
                       const std::map<std::string, double>& inputs) {
    double sum = intercept;
    for (const auto& [name, coefficient] : coefficients) {
        const auto it = inputs.find(name);
        if (it == inputs.end()) {
            throw ValidationError("missing input for model variable '" + name + "'");
        }
        sum += coefficient * it->second;
    }
    return sum;
}

}  // namespace

OlsFit ols_fit(const Dataset& d, const std::string& response,
               const std::vector<std::string>& predictors) {
    const auto y = d.values(response);
    const std::size_t n = y.size();
    const std::size_t p = predictors.size();
    if (n <= p + 1) {
        throw InsufficientDataError("ols_fit requires n > p + 1 (n=" + std::to_string(n) +
                                    ", p=" + std::to_string(p) + ")");
    }

    const std::size_t m = p + 1;
    std::vector<double> a(n * m, 1.0);  // intercept column first
    std::vector<std::string> column_names{"(Constant)"};
    column_names.reserve(m);
    std::vector<std::vector<double>> predictor_values;
    predictor_values.reserve(p);
    for (std::size_t j = 0; j < p; ++j) {
        auto column = d.values(predictors[j]);
        std::copy(column.begin(), column.end(), a.begin() + (j + 1) * n);
        predictor_values.push_back(std::move(column));
        column_names.push_back(predictors[j]);
    }

    auto solution = qr_least_squares(std::move(a), n, m, y, column_names);

    OlsFit fit;
    fit.response = response;
    fit.predictors = predictors;
    fit.n = n;
    fit.b = std::move(solution.coefficients);

    fit.fitted.assign(n, fit.b[0]);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) fit.fitted[i] += fit.b[j + 1] * predictor_values[j][i];
    }
    fit.residuals.resize(n);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fit.residuals[i] = y[i] - fit.fitted[i];
        sse += fit.residuals[i] * fit.residuals[i];
    }

    const double y_mean = mean_of(y);
    double sst = 0.0;
    for (double v : y) {
        const double dy = v - y_mean;
        sst += dy * dy;
    }
    if (sst == 0.0) {
        throw AnalysisError("response '" + response + "' has zero variance");
    }
    if (sse <= 1e-20 * sst) {
        sse = 0.0;  // exact fit up to the rank tolerance
    }

    const auto df_residual = static_cast<double>(n - p - 1);
    fit.r2 = std::clamp(1.0 - sse / sst, 0.0, 1.0);
    fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (static_cast<double>(n) - 1.0) / df_residual;
    fit.r = std::sqrt(fit.r2);
    fit.see = std::sqrt(sse / df_residual);

    const double sd_y = std::sqrt(sst / (static_cast<double>(n) - 1.0));
    fit.beta.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        fit.beta[j] = fit.b[j + 1] * sample_sd(predictor_values[j]) / sd_y;
    }

    fit.se_b.resize(m);
    fit.t_stats.resize(m);
    fit.p_values.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        fit.se_b[j] = fit.see * std::sqrt(solution.inv_xtx_diag[j]);
        if (fit.se_b[j] == 0.0) {
            fit.t_stats[j] = fit.b[j] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity() *
                                                         (fit.b[j] > 0.0 ? 1.0 : -1.0);
        } else {
            fit.t_stats[j] = fit.b[j] / fit.se_b[j];
        }
        fit.p_values[j] = t_two_tailed_p(fit.t_stats[j], df_residual).value;
    }
    return fit;
}

namespace {

struct EntryEvaluation {
    double sig = 1.0;
    double f_change = 0.0;
    OlsFit fit;
};

std::optional<EntryEvaluation> evaluate_entry(const Dataset& d, const std::string& response,
                                              std::vector<std::string> predictors,
                                              const std::string& candidate, double r2_prev) {
    predictors.push_back(candidate);
    OlsFit fit;
    try {
        fit = ols_fit(d, response, predictors);
    } catch (const CollinearityError&) {
        return std::nullopt;  // can never enter
    }
    EntryEvaluation eval;
    const auto df2 = static_cast<double>(fit.n - predictors.size() - 1);
    const double r2_change = fit.r2 - r2_prev;
    if (fit.r2 >= 1.0) {
        eval.f_change =
            r2_change > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
        eval.f_change = std::max(r2_change, 0.0) * df2 / (1.0 - fit.r2);
    }
    eval.sig = f_upper_p(eval.f_change, 1.0, df2).value;
    eval.fit = std::move(fit);
    return eval;
}

}  // namespace

StepwiseTrace stepwise_forward(const Dataset& d, const std::string& response,
                               const std::vector<std::string>& candidates, double p_enter) {
    if (candidates.empty()) {
        throw ValidationError("stepwise_forward requires at least one candidate");
    }
    if (!(p_enter > 0.0 && p_enter < 1.0)) {
        throw ValidationError("p_enter must lie in (0, 1), got " + std::to_string(p_enter));
    }

    StepwiseTrace trace;
    std::vector<std::string> entered;
    std::vector<std::string> remaining = candidates;
    double r2_prev = 0.0;

    while (!remaining.empty()) {
        std::optional<std::size_t> best_index;
        std::optional<EntryEvaluation> best;
        std::vector<double> entry_p(remaining.size(), 1.0);
        for (std::size_t c = 0; c < remaining.size(); ++c) {
            auto eval = evaluate_entry(d, response, entered, remaining[c], r2_prev);
            if (!eval) continue;
            entry_p[c] = eval->sig;
            const bool better =
                !best || eval->sig < best->sig ||
                (eval->sig == best->sig && eval->f_change > best->f_change);
            if (better) {
                best = std::move(eval);
                best_index = c;
            }
        }

        if (!best || best->sig > p_enter) {
            for (std::size_t c = 0; c < remaining.size(); ++c) {
                trace.excluded.emplace_back(remaining[c], entry_p[c]);
            }
            break;
        }

        const std::string variable = remaining[*best_index];
        entered.push_back(variable);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(*best_index));

        ModelSummaryRow row;
        row.step = entered.size();
        row.r = best->fit.r;
        row.r2 = best->fit.r2;
        row.adj_r2 = best->fit.adj_r2;
        row.see = best->fit.see;
        row.r2_change = best->fit.r2 - r2_prev;
        row.f_change = best->f_change;
        row.df1 = 1;
        row.df2 = best->fit.n - entered.size() - 1;
        row.sig_f_change = best->sig;
        row.entered = variable;
        trace.rows.push_back(row);

        r2_prev = best->fit.r2;
        trace.final = std::move(best->fit);
    }
    return trace;
}

std::vector<ModelSummaryRow> model_summary(const StepwiseTrace& trace) {
    if (trace.rows.empty()) {
        throw InsufficientDataError("stepwise trace has no entered variables");
    }
    return trace.rows;
}

ResidualStats residual_statistics(const OlsFit& fit) {
    ResidualStats stats;
    stats.n = fit.n;
    stats.predicted = block_of(fit.fitted);
    stats.residual = block_of(fit.residuals);

    std::vector<double> standardized(fit.n);
    const double sd_fitted = stats.predicted.sd;
    for (std::size_t i = 0; i < fit.n; ++i) {
        standardized[i] = sd_fitted > 0.0 ? (fit.fitted[i] - stats.predicted.mean) / sd_fitted : 0.0;
    }
    stats.std_predicted = block_of(standardized);

    for (std::size_t i = 0; i < fit.n; ++i) {
        standardized[i] = fit.see > 0.0 ? fit.residuals[i] / fit.see : 0.0;
    }
    stats.std_residual = block_of(standardized);
    return stats;
}

double predict(const OlsFit& fit, const std::map<std::string, double>& inputs) {
    std::vector<std::pair<std::string, double>> coefficients;
    coefficients.reserve(fit.predictors.size());
    for (std::size_t j = 0; j < fit.predictors.size(); ++j) {
        coefficients.emplace_back(fit.predictors[j], fit.b[j + 1]);
    }
    return evaluate_linear(fit.b[0], coefficients, inputs);
}

double predict(const PublishedModel& model, const std::map<std::string, double>& inputs) {
    return evaluate_linear(model.intercept, model.coefficients, inputs);
}

const std::vector<PublishedModel>& published_models() {
    static const std::vector<PublishedModel> models = {
        {"pv_model_4",
         7.468,
         {{"irradiance_wm2", 0.017},
          {"temperature_c", -0.155},
          {"relative_humidity_pct", -0.031},
          {"wind_speed_kmh", 0.030}}},
        {"load_model_2",
         15.614,
         {{"temperature_c", -0.168}, {"relative_humidity_pct", -0.056}}},
    };
    return models;
}

const PublishedModel& published_model(std::string_view name) {
    for (const auto& model : published_models()) {
        if (model.name == name) return model;
    }
    throw ValidationError("unknown published model '" + std::string(name) +
                          "' (available: pv_model_4, load_model_2)");
}

}  // namespace enstat
