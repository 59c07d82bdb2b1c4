#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "enstat/dataset.hpp"

namespace enstat {

/// Fitted linear model. b[0] is the intercept; b[1..p] follow the predictor
/// order. beta holds the standardized coefficients for the predictors only.
struct OlsFit {
    std::string response;
    std::vector<std::string> predictors;
    std::vector<double> b;
    std::vector<double> se_b;
    std::vector<double> beta;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double r = 0.0;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double see = 0.0;  // standard error of the estimate
    std::size_t n = 0;
    std::vector<double> residuals;
    std::vector<double> fitted;
};

struct ModelSummaryRow {
    std::size_t step = 0;  // 1-based
    double r = 0.0;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double see = 0.0;
    double r2_change = 0.0;
    double f_change = 0.0;
    std::size_t df1 = 1;
    std::size_t df2 = 0;
    double sig_f_change = 1.0;
    std::string entered;
};

struct StepwiseTrace {
    std::vector<ModelSummaryRow> rows;
    std::optional<OlsFit> final;  // absent when no candidate ever qualified
    std::vector<std::pair<std::string, double>> excluded;  // entry p at termination
};

struct ResidualStats {
    struct Block {
        double min = 0.0;
        double max = 0.0;
        double mean = 0.0;
        double sd = 0.0;
    };
    Block predicted;
    Block residual;
    Block std_predicted;
    Block std_residual;
    std::size_t n = 0;
};

/// Fixed reference model shipped with the library: intercept plus named
/// coefficients.
struct PublishedModel {
    std::string name;
    double intercept = 0.0;
    std::vector<std::pair<std::string, double>> coefficients;
};

/// Least squares with an intercept, solved by Householder QR with column
/// pivoting (rank decided at 1e-10 of the largest pivot). Throws
/// CollinearityError naming the dependent column on rank deficiency.
OlsFit ols_fit(const Dataset& d, const std::string& response,
               const std::vector<std::string>& predictors);

/// Forward selection: at each step enters the candidate with the smallest
/// probability of F-to-enter, while it is <= p_enter. Ties break toward the
/// larger F change, then candidate order.
StepwiseTrace stepwise_forward(const Dataset& d, const std::string& response,
                               const std::vector<std::string>& candidates,
                               double p_enter = 0.05);

std::vector<ModelSummaryRow> model_summary(const StepwiseTrace& trace);

ResidualStats residual_statistics(const OlsFit& fit);

double predict(const OlsFit& fit, const std::map<std::string, double>& inputs);
double predict(const PublishedModel& model, const std::map<std::string, double>& inputs);

/// The two fitted energy models shipped as executable artifacts: pv_model_4
/// (solar output from irradiance, temperature, humidity, wind) and
/// load_model_2 (building load from temperature and humidity).
const std::vector<PublishedModel>& published_models();
const PublishedModel& published_model(std::string_view name);

}  // namespace enstat
