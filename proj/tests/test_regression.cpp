#include <doctest.h>

#include <cmath>
#include <vector>

#include "enstat/errors.hpp"
#include "enstat/regression.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace enstat;

TEST_CASE("ols_fit reproduces an exact line") {
    const auto d = synth::make_dataset({"x", "y"}, {{0, 1, 2}, {1, 3, 5}});
    const auto fit = ols_fit(d, "y", {"x"});
    CHECK(fit.b[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.b[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.see == doctest::Approx(0.0));
    for (double r : fit.residuals) CHECK(std::fabs(r) < 1e-12);
    CHECK(fit.p_values[1] == 0.0);
}

TEST_CASE("ols_fit matches hand-solved normal equations") {
    const auto d = synth::make_dataset({"x", "y"}, {{0, 1, 2}, {0, 1, 1}});
    const auto fit = ols_fit(d, "y", {"x"});
    CHECK(fit.b[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(fit.b[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("ols_fit raises a collinearity error naming the dependent column") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y = {2, 4, 5, 4, 6};
    const auto d = synth::make_dataset({"x1", "x2", "y"}, {x, x, y});
    try {
        ols_fit(d, "y", {"x1", "x2"});
        FAIL("expected CollinearityError");
    } catch (const CollinearityError& e) {
        const std::string what = e.what();
        CHECK(what.find("x") != std::string::npos);
    }
}

TEST_CASE("ols_fit requires more rows than coefficients") {
    const auto d = synth::make_dataset({"x", "y"}, {{0, 1}, {1, 2}});
    CHECK_THROWS_AS(ols_fit(d, "y", {"x"}), InsufficientDataError);
}

TEST_CASE("ols_fit recovers noiseless coefficients") {
    synth::Rng rng(401);
    const std::size_t n = 200;
    const std::size_t p = 5;
    std::vector<std::vector<double>> columns(p + 1);
    const std::vector<double> beta = {3.0, -1.5, 0.25, 2.0, -0.75};
    const double intercept = 4.2;
    for (std::size_t j = 0; j < p; ++j) {
        columns[j].resize(n);
        for (auto& v : columns[j]) v = rng.normal(0.0, rng.uniform(0.5, 5.0));
    }
    columns[p].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double y = intercept;
        for (std::size_t j = 0; j < p; ++j) y += beta[j] * columns[j][i];
        columns[p][i] = y;
    }
    const auto d =
        synth::make_dataset({"x1", "x2", "x3", "x4", "x5", "y"}, columns);
    const auto fit = ols_fit(d, "y", {"x1", "x2", "x3", "x4", "x5"});
    CHECK(std::fabs(fit.b[0] - intercept) <= 1e-8);
    for (std::size_t j = 0; j < p; ++j) {
        CHECK(std::fabs(fit.b[j + 1] - beta[j]) <= 1e-8);
    }
}

TEST_CASE("ols_fit satisfies its own invariants on noisy data") {
    synth::Rng rng(402);
    const std::size_t n = 150;
    std::vector<double> x1(n), x2(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.normal(10.0, 4.0);
        x2[i] = rng.normal(-3.0, 2.0);
        y[i] = 1.0 + 0.5 * x1[i] - 1.2 * x2[i] + rng.normal(0.0, 2.0);
    }
    const auto d = synth::make_dataset({"x1", "x2", "y"}, {x1, x2, y});
    const auto fit = ols_fit(d, "y", {"x1", "x2"});

    const auto nd = static_cast<double>(n);
    CHECK(fit.adj_r2 ==
          doctest::Approx(1.0 - (1.0 - fit.r2) * (nd - 1.0) / (nd - 3.0)).epsilon(1e-12));
    CHECK(fit.beta[0] ==
          doctest::Approx(fit.b[1] * oracle::sd(x1) / oracle::sd(y)).epsilon(1e-10));
    CHECK(fit.beta[1] ==
          doctest::Approx(fit.b[2] * oracle::sd(x2) / oracle::sd(y)).epsilon(1e-10));
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(fit.t_stats[j] == doctest::Approx(fit.b[j] / fit.se_b[j]).epsilon(1e-12));
    }
    CHECK(std::fabs(oracle::mean(fit.residuals)) <= 1e-9);
    CHECK(oracle::sd(fit.fitted) == doctest::Approx(fit.r * oracle::sd(y)).epsilon(1e-9));

    // First-order optimality: residuals orthogonal to every column.
    double resid_norm = 0.0;
    for (double r : fit.residuals) resid_norm += r * r;
    resid_norm = std::sqrt(resid_norm);
    for (const auto* column : {&x1, &x2}) {
        double dot = 0.0, col_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += (*column)[i] * fit.residuals[i];
            col_norm += (*column)[i] * (*column)[i];
        }
        CHECK(std::fabs(dot) / (std::sqrt(col_norm) * resid_norm) <= 1e-8);
    }
    double intercept_dot = 0.0;
    for (double r : fit.residuals) intercept_dot += r;
    CHECK(std::fabs(intercept_dot) / (std::sqrt(nd) * resid_norm) <= 1e-8);
}

TEST_CASE("rescaling a predictor rescales only its own coefficient") {
    synth::Rng rng(403);
    const std::size_t n = 80;
    std::vector<double> x1(n), x2(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.normal(0.0, 1.0);
        x2[i] = rng.normal(0.0, 1.0);
        y[i] = 2.0 + x1[i] - 0.5 * x2[i] + rng.normal(0.0, 0.8);
    }
    const double c = 37.5;
    std::vector<double> x1s(n);
    for (std::size_t i = 0; i < n; ++i) x1s[i] = c * x1[i];

    const auto base = ols_fit(synth::make_dataset({"x1", "x2", "y"}, {x1, x2, y}), "y",
                              {"x1", "x2"});
    const auto scaled = ols_fit(synth::make_dataset({"x1", "x2", "y"}, {x1s, x2, y}), "y",
                                {"x1", "x2"});

    CHECK(scaled.b[1] == doctest::Approx(base.b[1] / c).epsilon(1e-9));
    CHECK(scaled.se_b[1] == doctest::Approx(base.se_b[1] / c).epsilon(1e-9));
    CHECK(scaled.beta[0] == doctest::Approx(base.beta[0]).epsilon(1e-9));
    CHECK(scaled.t_stats[1] == doctest::Approx(base.t_stats[1]).epsilon(1e-9));
    CHECK(scaled.r2 == doctest::Approx(base.r2).epsilon(1e-9));
    CHECK(scaled.adj_r2 == doctest::Approx(base.adj_r2).epsilon(1e-9));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(scaled.fitted[i] == doctest::Approx(base.fitted[i]).epsilon(1e-9));
    }

    // Entry order is scale free as well.
    const auto base_trace = stepwise_forward(
        synth::make_dataset({"x1", "x2", "y"}, {x1, x2, y}), "y", {"x1", "x2"});
    const auto scaled_trace = stepwise_forward(
        synth::make_dataset({"x1", "x2", "y"}, {x1s, x2, y}), "y", {"x1", "x2"});
    REQUIRE(base_trace.rows.size() == scaled_trace.rows.size());
    for (std::size_t s = 0; s < base_trace.rows.size(); ++s) {
        CHECK(base_trace.rows[s].entered == scaled_trace.rows[s].entered);
    }
}

TEST_CASE("adjusted R^2 sits strictly below R^2 for imperfect fits") {
    synth::Rng rng(408);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 40;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal(0.0, 1.0);
            y[i] = x[i] + rng.normal(0.0, 1.0);
        }
        const auto fit = ols_fit(synth::make_dataset({"x", "y"}, {x, y}), "y", {"x"});
        if (fit.r2 < 1.0) CHECK(fit.adj_r2 < fit.r2);
    }
}

TEST_CASE("stepwise enters only the true predictor") {
    synth::Rng rng(404);
    const std::size_t n = 50;
    std::vector<double> x1(n), noise(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.normal(0.0, 1.0);
        noise[i] = rng.normal(0.0, 1.0);
        y[i] = 2.0 * x1[i];
    }
    const auto d = synth::make_dataset({"x1", "noise", "y"}, {x1, noise, y});
    const auto trace = stepwise_forward(d, "y", {"x1", "noise"});

    REQUIRE(trace.rows.size() == 1);
    CHECK(trace.rows[0].entered == "x1");
    CHECK(trace.rows[0].r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isinf(trace.rows[0].f_change));
    CHECK(trace.rows[0].sig_f_change == 0.0);
    REQUIRE(trace.final.has_value());
    CHECK(trace.final->predictors == std::vector<std::string>{"x1"});
    REQUIRE(trace.excluded.size() == 1);
    CHECK(trace.excluded[0].first == "noise");
    CHECK(trace.excluded[0].second > 0.05);
}

TEST_CASE("stepwise f_change equals the entered coefficient's squared t") {
    synth::Rng rng(405);
    const std::size_t n = 400;
    std::vector<double> x1(n), x2(n), x3(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.normal(0.0, 2.0);
        x2[i] = rng.normal(0.0, 2.0);
        x3[i] = rng.normal(0.0, 2.0);
        y[i] = 3.0 * x1[i] + 1.0 * x2[i] + 0.4 * x3[i] + rng.normal(0.0, 2.0);
    }
    const auto d = synth::make_dataset({"x1", "x2", "x3", "y"}, {x1, x2, x3, y});
    const auto trace = stepwise_forward(d, "y", {"x1", "x2", "x3"});
    REQUIRE(trace.rows.size() == 3);

    std::vector<std::string> entered;
    double prev_r2 = 0.0;
    for (const auto& row : trace.rows) {
        entered.push_back(row.entered);
        const auto fit = ols_fit(d, "y", entered);
        const std::size_t j = entered.size();  // entered variable is last
        CHECK(row.f_change ==
              doctest::Approx(fit.t_stats[j] * fit.t_stats[j]).epsilon(1e-6));
        CHECK(row.r2_change == doctest::Approx(row.r2 - prev_r2).epsilon(1e-12));
        CHECK(row.df2 == fit.n - entered.size() - 1);
        prev_r2 = row.r2;
    }
    // Adjusted R^2 never decreases along an accepted forward path here.
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        CHECK(trace.rows[i].adj_r2 >= trace.rows[i - 1].adj_r2 - 1e-12);
    }
}

TEST_CASE("stepwise with no qualifying candidate yields an empty trace") {
    synth::Rng rng(406);
    const std::size_t n = 60;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal(0.0, 1.0);
        y[i] = rng.normal(0.0, 1.0);
    }
    const auto d = synth::make_dataset({"x", "y"}, {x, y});
    const auto trace = stepwise_forward(d, "y", {"x"}, 0.0001);
    CHECK(trace.rows.empty());
    CHECK_FALSE(trace.final.has_value());
    REQUIRE(trace.excluded.size() == 1);
    CHECK(trace.excluded[0].second > 0.0001);
    CHECK_THROWS_AS(model_summary(trace), InsufficientDataError);
}

TEST_CASE("stepwise rejects bad arguments") {
    const auto d = synth::make_dataset({"x", "y"}, {{1, 2, 3, 4}, {1, 2, 3, 4}});
    CHECK_THROWS_AS(stepwise_forward(d, "y", {}), ValidationError);
    CHECK_THROWS_AS(stepwise_forward(d, "y", {"x"}, 0.0), ValidationError);
    CHECK_THROWS_AS(stepwise_forward(d, "y", {"x"}, 1.0), ValidationError);
}

TEST_CASE("residual statistics blocks are internally consistent") {
    synth::Rng rng(407);
    const std::size_t n = 120;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal(0.0, 3.0);
        y[i] = 5.0 - 0.8 * x[i] + rng.normal(0.0, 1.5);
    }
    const auto d = synth::make_dataset({"x", "y"}, {x, y});
    const auto fit = ols_fit(d, "y", {"x"});
    const auto stats = residual_statistics(fit);

    CHECK(stats.n == n);
    CHECK(std::fabs(stats.std_predicted.mean) <= 1e-12);
    CHECK(stats.std_predicted.sd == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(stats.residual.mean) <= 1e-9);
    const auto nd = static_cast<double>(n);
    CHECK(stats.residual.sd ==
          doctest::Approx(fit.see * std::sqrt((nd - 2.0) / (nd - 1.0))).epsilon(1e-9));
    CHECK(stats.std_residual.min == doctest::Approx(stats.residual.min / fit.see).epsilon(1e-12));
    CHECK(stats.predicted.sd == doctest::Approx(fit.r * oracle::sd(y)).epsilon(1e-9));
}

TEST_CASE("residual statistics of an exact fit are all zero") {
    const auto d = synth::make_dataset({"x", "y"}, {{0, 1, 2, 3}, {1, 3, 5, 7}});
    const auto stats = residual_statistics(ols_fit(d, "y", {"x"}));
    CHECK(stats.residual.min == doctest::Approx(0.0));
    CHECK(stats.residual.max == doctest::Approx(0.0));
    CHECK(stats.std_residual.min == 0.0);
    CHECK(stats.std_residual.max == 0.0);
}

TEST_CASE("published models carry the exact shipped coefficients") {
    const auto& models = published_models();
    REQUIRE(models.size() == 2);

    const auto& pv = published_model("pv_model_4");
    CHECK(pv.intercept == 7.468);
    REQUIRE(pv.coefficients.size() == 4);
    CHECK(pv.coefficients[0].first == "irradiance_wm2");
    CHECK(pv.coefficients[0].second == 0.017);
    CHECK(pv.coefficients[1].first == "temperature_c");
    CHECK(pv.coefficients[1].second == -0.155);
    CHECK(pv.coefficients[2].first == "relative_humidity_pct");
    CHECK(pv.coefficients[2].second == -0.031);
    CHECK(pv.coefficients[3].first == "wind_speed_kmh");
    CHECK(pv.coefficients[3].second == 0.030);

    const auto& load = published_model("load_model_2");
    CHECK(load.intercept == 15.614);
    REQUIRE(load.coefficients.size() == 2);
    CHECK(load.coefficients[0].second == -0.168);
    CHECK(load.coefficients[1].second == -0.056);

    CHECK_THROWS_AS(published_model("nonexistent"), ValidationError);
}

TEST_CASE("predict evaluates the shipped models") {
    const auto& pv = published_model("pv_model_4");
    CHECK(std::fabs(predict(pv, {{"irradiance_wm2", 500.0},
                                 {"temperature_c", 30.0},
                                 {"relative_humidity_pct", 40.0},
                                 {"wind_speed_kmh", 10.0}}) -
                    10.378) <= 1e-9);
    CHECK(predict(pv, {{"irradiance_wm2", 0.0},
                       {"temperature_c", 0.0},
                       {"relative_humidity_pct", 0.0},
                       {"wind_speed_kmh", 0.0}}) == 7.468);

    const auto& load = published_model("load_model_2");
    CHECK(std::fabs(predict(load, {{"temperature_c", 30.0},
                                   {"relative_humidity_pct", 40.0}}) -
                    8.334) <= 1e-9);
    CHECK(predict(load, {{"temperature_c", 0.0}, {"relative_humidity_pct", 0.0}}) == 15.614);

    try {
        predict(pv, {{"temperature_c", 30.0}});
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("irradiance_wm2") != std::string::npos);
    }
}

TEST_CASE("predict works on fitted models too") {
    const auto d = synth::make_dataset({"x", "y"}, {{0, 1, 2}, {1, 3, 5}});
    const auto fit = ols_fit(d, "y", {"x"});
    CHECK(predict(fit, {{"x", 10.0}}) == doctest::Approx(21.0).epsilon(1e-10));
}
