#include <doctest.h>

#include <cmath>
#include <vector>

#include "enstat/errors.hpp"
#include "enstat/inference.hpp"
#include "enstat/special_functions.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace enstat;

TEST_CASE("pearson detects perfect linear relations") {
    const std::vector<double> x = {1, 2, 3};
    const std::vector<double> up = {2, 4, 6};
    const std::vector<double> down = {3, 2, 1};

    const auto pos = pearson(x, up);
    CHECK(pos.r == 1.0);
    CHECK(*pos.p_two_tailed == 0.0);
    CHECK(pos.flag == Significance::p_lt_01);

    const auto neg = pearson(x, down);
    CHECK(neg.r == -1.0);
    CHECK(*neg.p_two_tailed == 0.0);
}

TEST_CASE("pearson p-value comes from the t transform") {
    synth::Rng rng(301);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(rng.uniform(4.0, 120.0));
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal(0.0, 1.0);
            y[i] = 0.4 * x[i] + rng.normal(0.0, 1.0);
        }
        const auto c = pearson(x, y);
        CHECK(c.r == doctest::Approx(oracle::pearson_r(x, y)).epsilon(1e-10));
        if (std::fabs(c.r) < 1.0) {
            const auto df = static_cast<double>(n - 2);
            const double t = c.r * std::sqrt(df / (1.0 - c.r * c.r));
            CHECK(*c.p_two_tailed == t_two_tailed_p(t, df).value);  // exact reproduction
        }
    }
}

TEST_CASE("pearson significance at a realistic sample size") {
    // r = .756 with n = 1753 corresponds to t around 48: far beyond any
    // printable significance level.
    const double r = 0.756;
    const double n = 1753;
    const double t = r * std::sqrt((n - 2) / (1.0 - r * r));
    CHECK(t == doctest::Approx(48.33).epsilon(1e-3));
    CHECK(t_two_tailed_p(t, n - 2).value < 0.0005);
}

TEST_CASE("pearson rejects degenerate inputs") {
    const std::vector<double> constant = {2, 2, 2};
    const std::vector<double> x = {1, 2, 3};
    CHECK_THROWS_AS(pearson(x, constant), AnalysisError);
    CHECK_THROWS_AS(pearson(constant, x), AnalysisError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                    InsufficientDataError);
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("pearson shift and scale invariance") {
    synth::Rng rng(302);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 60;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.normal(0.0, 2.0);
            y[i] = 0.7 * x[i] + rng.normal(0.0, 1.0);
        }
        const double a = rng.uniform(-4.0, 4.0);
        const double c = rng.uniform(-4.0, 4.0);
        if (a == 0.0 || c == 0.0) continue;
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = a * x[i] + 1.5;
            ys[i] = c * y[i] - 2.5;
        }
        const double sign = (a * c) > 0 ? 1.0 : -1.0;
        CHECK(pearson(xs, ys).r == doctest::Approx(sign * pearson(x, y).r).epsilon(1e-10));
    }
}

TEST_CASE("correlation_matrix is symmetric with a unit diagonal") {
    synth::Rng rng(303);
    const std::size_t n = 40;
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.normal(0.0, 1.0);
        b[i] = 0.5 * a[i] + rng.normal(0.0, 1.0);
        c[i] = rng.normal(5.0, 2.0);
    }
    const auto d = synth::make_dataset({"a", "b", "c"}, {a, b, c});
    const auto m = correlation_matrix(d, {"a", "b", "c"});

    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(m.cells[i][i].r == 1.0);
        CHECK_FALSE(m.cells[i][i].p_two_tailed.has_value());
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(m.cells[i][j].r == m.cells[j][i].r);
        }
    }
    CHECK(m.cells[0][1].r == doctest::Approx(oracle::pearson_r(a, b)).epsilon(1e-12));
}

TEST_CASE("correlation_matrix of identical columns") {
    const std::vector<double> v = {1, 2, 3, 4, 5};
    const auto d = synth::make_dataset({"a", "b"}, {v, v});
    const auto m = correlation_matrix(d, {"a", "b"});
    CHECK(m.cells[0][1].r == 1.0);
    CHECK(*m.cells[0][1].p_two_tailed == 0.0);
}

TEST_CASE("correlation_matrix propagates degenerate-column errors") {
    const auto d = synth::make_dataset({"a", "flat"}, {{1, 2, 3, 4}, {7, 7, 7, 7}});
    CHECK_THROWS_AS(correlation_matrix(d, {"a", "flat"}), AnalysisError);
    CHECK_THROWS_AS(correlation_matrix(d, {"a"}), ValidationError);
}

TEST_CASE("correlation_matrix honors a row-subset predicate") {
    const auto d = synth::make_dataset(
        {"irr", "pv"}, {{0, 0, 100, 200, 300, 400}, {0, 0, 2, 4, 5.5, 8}});
    const auto m = correlation_matrix(d, {"irr", "pv"}, {{parse_comparison("irr>0")}});
    CHECK(m.cells[0][0].n == 4);
    CHECK(m.cells[0][1].n == 4);
}

TEST_CASE("make_groups chronological blocks give the classic df split") {
    std::vector<double> v(6830);
    synth::Rng rng(304);
    for (auto& x : v) x = rng.normal(0.0, 1.0);
    const auto d = synth::make_dataset({"x"}, {v});

    const auto g = make_groups(d, "x", GroupingScheme::equal_count_bins("", 25));
    CHECK(g.k == 25);
    CHECK(g.n_total == 6830);
    const auto r = anova_oneway(g);
    CHECK(r.df1 == 24);
    CHECK(r.df2 == 6805);
    const auto l = levene(g, LeveneVariant::mean);
    CHECK(l.df1 == 24);
    CHECK(l.df2 == 6805.0);
}

TEST_CASE("make_groups by_column splits on distinct values") {
    const auto d = synth::make_dataset({"x", "flag"},
                                       {{1, 2, 3, 4, 5, 6}, {0, 1, 0, 1, 0, 1}});
    const auto g = make_groups(d, "x", GroupingScheme::by_column("flag"));
    CHECK(g.k == 2);
    CHECK(g.groups[0].second == std::vector<double>{1, 3, 5});
    CHECK(g.groups[1].second == std::vector<double>{2, 4, 6});
}

TEST_CASE("make_groups rank bins send ties to the lower bin") {
    // Keys 5,5,5,5 straddle the bin boundary; all four stay in bin 1.
    const auto d = synth::make_dataset(
        {"x", "key"}, {{1, 2, 3, 4, 5, 6, 7, 8}, {1, 2, 5, 5, 5, 5, 8, 9}});
    const auto g = make_groups(d, "x", GroupingScheme::equal_count_bins("key", 2));
    CHECK(g.k == 2);
    CHECK(g.groups[0].second.size() == 6);
    CHECK(g.groups[1].second.size() == 2);
}

TEST_CASE("make_groups rejects degenerate schemes") {
    const auto d = synth::make_dataset({"x"}, {{1, 2, 3, 4}});
    CHECK_THROWS_AS(make_groups(d, "x", GroupingScheme::equal_count_bins("", 1)),
                    GroupingError);
    CHECK_THROWS_AS(make_groups(d, "x", GroupingScheme::equal_count_bins("", 9)),
                    GroupingError);
    const auto single = synth::make_dataset({"x", "flag"}, {{1, 2, 3}, {7, 7, 7}});
    CHECK_THROWS_AS(make_groups(single, "x", GroupingScheme::by_column("flag")),
                    GroupingError);
}

namespace {

GroupedSeries series_of(std::vector<std::vector<double>> groups) {
    GroupedSeries g;
    g.k = groups.size();
    for (std::size_t i = 0; i < groups.size(); ++i) {
        g.n_total += groups[i].size();
        g.groups.emplace_back(std::to_string(i + 1), std::move(groups[i]));
    }
    return g;
}

}  // namespace

TEST_CASE("levene hand-computed two-group case") {
    const auto g = series_of({{1, 2, 3}, {4, 8, 12}});
    const auto r = levene(g, LeveneVariant::mean);
    CHECK(r.w == doctest::Approx(36.0 / 17.0).epsilon(1e-12));
    CHECK(r.df1 == 1);
    CHECK(r.df2 == 4.0);
    CHECK(r.p == doctest::Approx(0.21930692358453664).epsilon(1e-12));
}

TEST_CASE("levene is exactly zero for identical group multisets") {
    const auto g = series_of({{1, 5, 9}, {9, 5, 1}});
    for (const auto variant : {LeveneVariant::mean, LeveneVariant::median,
                               LeveneVariant::median_adjusted_df, LeveneVariant::trimmed_mean}) {
        const auto r = levene(g, variant);
        CHECK(r.w == 0.0);
        CHECK(r.p == 1.0);
    }
}

TEST_CASE("levene variants agree with the naive oracle") {
    synth::Rng rng(305);
    for (int trial = 0; trial < 50; ++trial) {
        const auto k = static_cast<std::size_t>(rng.uniform(2.0, 6.0));
        std::vector<std::vector<double>> groups(k);
        for (auto& g : groups) {
            const auto ni = static_cast<std::size_t>(rng.uniform(3.0, 40.0));
            g.resize(ni);
            const double sigma = rng.uniform(0.5, 4.0);
            for (auto& v : g) v = rng.normal(0.0, sigma);
        }
        const auto g = series_of(groups);
        CHECK(levene(g, LeveneVariant::mean).w ==
              doctest::Approx(oracle::levene_w(groups, oracle::LeveneCenter::mean))
                  .epsilon(1e-10));
        CHECK(levene(g, LeveneVariant::median).w ==
              doctest::Approx(oracle::levene_w(groups, oracle::LeveneCenter::median))
                  .epsilon(1e-10));
        CHECK(levene(g, LeveneVariant::trimmed_mean).w ==
              doctest::Approx(oracle::levene_w(groups, oracle::LeveneCenter::trimmed_mean))
                  .epsilon(1e-10));

        const auto adjusted = levene(g, LeveneVariant::median_adjusted_df);
        CHECK(adjusted.w == levene(g, LeveneVariant::median).w);
        CHECK(adjusted.df2 ==
              doctest::Approx(oracle::levene_adjusted_df2(groups)).epsilon(1e-10));
        CHECK(adjusted.df2 <= static_cast<double>(g.n_total - g.k) + 1e-12);
        CHECK(adjusted.df2 > 0.0);
    }
}

TEST_CASE("levene W is scale invariant") {
    synth::Rng rng(306);
    std::vector<std::vector<double>> groups = {{1.2, 3.4, 2.2, 0.1}, {5, 6, 7}, {2, 9, 4, 4, 3}};
    const double base = levene(series_of(groups), LeveneVariant::mean).w;
    for (const double c : {2.0, -3.5, 0.25}) {
        auto scaled = groups;
        for (auto& g : scaled) {
            for (auto& v : g) v *= c;
        }
        CHECK(levene(series_of(scaled), LeveneVariant::mean).w ==
              doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("anova hand-computed two-group case") {
    const auto g = series_of({{1, 2, 3}, {4, 5, 6}});
    const auto r = anova_oneway(g);
    CHECK(r.ss_between == doctest::Approx(13.5).epsilon(1e-12));
    CHECK(r.ss_within == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.f == doctest::Approx(13.5).epsilon(1e-12));
    CHECK(r.df1 == 1);
    CHECK(r.df2 == 4);
    CHECK(r.p == doctest::Approx(0.021311641128756726).epsilon(1e-12));
}

TEST_CASE("anova with equal group means") {
    const auto g = series_of({{1, 2, 3}, {3, 2, 1}});
    const auto r = anova_oneway(g);
    CHECK(r.f == doctest::Approx(0.0));
    CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("anova F equals the pooled two-sample t squared") {
    synth::Rng rng(307);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n1 = static_cast<std::size_t>(rng.uniform(3.0, 30.0));
        const auto n2 = static_cast<std::size_t>(rng.uniform(3.0, 30.0));
        std::vector<double> g1(n1), g2(n2);
        for (auto& v : g1) v = rng.normal(0.0, 1.0);
        for (auto& v : g2) v = rng.normal(0.5, 1.0);

        const auto r = anova_oneway(series_of({g1, g2}));

        const double m1 = oracle::mean(g1);
        const double m2 = oracle::mean(g2);
        const double sp2 = ((n1 - 1) * oracle::variance(g1) + (n2 - 1) * oracle::variance(g2)) /
                           static_cast<double>(n1 + n2 - 2);
        const double t = (m1 - m2) / std::sqrt(sp2 * (1.0 / n1 + 1.0 / n2));
        CHECK(r.f == doctest::Approx(t * t).epsilon(1e-9));
    }
}

TEST_CASE("anova sum decomposition matches the total") {
    synth::Rng rng(308);
    for (int trial = 0; trial < 20; ++trial) {
        const auto k = static_cast<std::size_t>(rng.uniform(2.0, 7.0));
        std::vector<std::vector<double>> groups(k);
        std::vector<double> all;
        for (auto& g : groups) {
            const auto ni = static_cast<std::size_t>(rng.uniform(2.0, 25.0));
            g.resize(ni);
            for (auto& v : g) {
                v = rng.normal(rng.uniform(-2.0, 2.0), 1.5);
                all.push_back(v);
            }
        }
        const auto r = anova_oneway(series_of(groups));
        const double total_mean = oracle::mean(all);
        double sst = 0.0;
        for (double v : all) sst += (v - total_mean) * (v - total_mean);
        CHECK(r.ss_between + r.ss_within == doctest::Approx(sst).epsilon(1e-9));
        CHECK(r.f == doctest::Approx(oracle::anova_f(groups)).epsilon(1e-10));
    }
}

TEST_CASE("anova degenerate dispersion edge") {
    const auto r = anova_oneway(series_of({{2, 2}, {5, 5}}));
    CHECK(std::isinf(r.f));
    CHECK(r.p == 0.0);
}

TEST_CASE("correlated energy data reproduces the desert sign pattern") {
    // Common-driver weather makes PV correlate positively with temperature
    // even though the model's temperature coefficient is negative, and
    // negatively with humidity, wind and dust; load falls with temperature.
    synth::Rng rng(909);
    const auto d = synth::make_correlated_energy_dataset(4000, 4.0, 10.9, rng);
    const auto m = correlation_matrix(
        d, {"pv_kw", "temperature_c", "relative_humidity_pct", "wind_speed_kmh", "dust_mgm3",
            "load_kw"});

    const auto r = [&](std::size_t i, std::size_t j) { return m.cells[i][j].r; };
    CHECK(r(0, 1) > 0.0);   // pv vs temperature
    CHECK(r(0, 2) < 0.0);   // pv vs humidity
    CHECK(r(0, 3) < 0.0);   // pv vs wind
    CHECK(r(0, 4) < 0.0);   // pv vs dust
    CHECK(r(5, 1) < 0.0);   // load vs temperature
}

TEST_CASE("a huge homogeneity statistic renders as .000") {
    const auto p = f_upper_p(13.088, 24.0, 6805.0);
    CHECK(p.value < 0.0005);
}
