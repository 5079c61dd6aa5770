#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bi3/measures.hpp"
#include "bi3/rng.hpp"

using namespace bi3;

namespace {

Dataset line_dataset(const std::vector<double>& xs, const std::vector<int>& labels) {
    FeatureSchema schema{{Column{"x", ColumnKind::numeric, {}}}};
    return Dataset(schema, xs, labels, "p", "n");
}

ClassStats stats_of(const Dataset& d) {
    return d.class_stats();
}

}  // namespace

TEST_CASE("posterior difference from neighborhood counts: frozen values") {
    // M=3, k=5, r=5: f_n=0.6, f_p=0.4, f'_p=2.0 -> 2/2.6 - 0.4 = 24/65
    CHECK(ibi3_from_counts(3, 5, 5.0) == Catch::Approx(24.0 / 65.0).epsilon(1e-12));
    // M=7, k=8, r=10: 1.25/2.125 - 0.125 = 0.4632352941...
    CHECK(ibi3_from_counts(7, 8, 10.0) == Catch::Approx(0.46323529411764705).epsilon(1e-12));
    // M=6, k=7, r=3: 1/3 - 1/7 = 4/21
    CHECK(ibi3_from_counts(6, 7, 3.0) == Catch::Approx(4.0 / 21.0).epsilon(1e-12));
}

TEST_CASE("posterior difference vanishes without imbalance or without majority") {
    CHECK(ibi3_from_counts(0, 5, 7.0) == 0.0);
    CHECK(ibi3_from_counts(3, 5, 1.0) == 0.0);
    CHECK(normalized_posterior_difference(0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("posterior difference is within [0,1) and increases with imbalance") {
    for (std::size_t k = 2; k <= 12; ++k) {
        for (std::size_t m = 0; m < k; ++m) {
            double prev = 0.0;
            for (const double r : {1.0, 1.5, 2.0, 5.0, 10.0, 50.0, 200.0}) {
                const double v = ibi3_from_counts(m, k, r);
                REQUIRE(v >= 0.0);
                REQUIRE(v < 1.0);
                REQUIRE(v >= prev - 1e-15);
                prev = v;
            }
        }
    }
}

TEST_CASE("posterior difference rejects invalid counts") {
    CHECK_THROWS_AS(ibi3_from_counts(0, 0, 2.0), PreconditionError);
    CHECK_THROWS_AS(ibi3_from_counts(5, 5, 2.0), PreconditionError);
    CHECK_THROWS_AS(ibi3_from_counts(2, 5, 0.5), PreconditionError);
}

TEST_CASE("kdn counts differing neighbors") {
    const Dataset d = line_dataset({0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, {1, 1, -1, -1, -1, -1});
    CHECK(kdn(d, 0, 3) == Catch::Approx(2.0 / 3.0));
    CHECK(kdn(d, 4, 3) == Catch::Approx(0.0));
    CHECK(kdn(d, 2, 3) == Catch::Approx(2.0 / 3.0));  // neighbors rows 1,3,0 -> p,n,p
}

TEST_CASE("histogram class likelihood: frozen oracle") {
    // x: 0,1 in class p; 9,10 in class n; 10 bins over [0,10]
    const Dataset d = line_dataset({0.0, 1.0, 9.0, 10.0}, {1, 1, -1, -1});
    CHECK(cl(d, 0) == Catch::Approx(1.0 - 2.0 / 12.0).epsilon(1e-12));
    CHECK(cl(d, 2) == Catch::Approx(1.0 - 3.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("class likelihood multiplies per-column factors") {
    FeatureSchema schema{{Column{"x", ColumnKind::numeric, {}},
                          Column{"c", ColumnKind::nominal, {"a", "b"}}}};
    const Dataset d(schema, {0.0, 0.0, 1.0, 0.0, 9.0, 1.0, 10.0, 1.0}, {1, 1, -1, -1},
                    "p", "n");
    // row 0: numeric factor (1+1)/(2+10) = 1/6, nominal factor (2+1)/(2+2) = 3/4
    CHECK(cl(d, 0) == Catch::Approx(1.0 - (1.0 / 6.0) * (3.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("constant numeric columns under each estimator") {
    const Dataset d = line_dataset({3.0, 3.0, 3.0, 3.0}, {1, 1, -1, -1});
    // histogram: every row falls into bin 0 -> (2+1)/(2+10)
    CHECK(cl(d, 0, 10, ClEstimator::histogram) ==
          Catch::Approx(1.0 - 3.0 / 12.0).epsilon(1e-12));
    // gaussian: zero-width column carries no information -> factor 1
    CHECK(cl(d, 0, 10, ClEstimator::gaussian) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("gaussian class likelihood uses fitted per-class normals") {
    const Dataset d = line_dataset({0.0, 2.0, 4.0, 6.0}, {1, 1, -1, -1});
    // fitted class p: mean 1, sd sqrt(2); bin width (6-0)/10 = 0.6
    const double sd = std::sqrt(2.0);
    const auto phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
    const double mass = phi((0.0 + 0.3 - 1.0) / sd) - phi((0.0 - 0.3 - 1.0) / sd);
    CHECK(cl(d, 0, 10, ClEstimator::gaussian) == Catch::Approx(1.0 - mass).epsilon(1e-10));
}

TEST_CASE("class mixture counts weak neighborhoods over all samples") {
    const Dataset d = line_dataset({0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, {1, 1, -1, -1, -1, -1});
    CHECK(cm(d, 3) == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(cm(d, 3, MetricConfig{}, 4) == Catch::Approx(0.5).epsilon(1e-12));  // thread count
    CHECK_THROWS_AS(cm(d, 0), PreconditionError);
    CHECK_THROWS_AS(cm(d, 6), PreconditionError);
}

TEST_CASE("dataset measurement on a flexible-growth example") {
    // minority at both ends, majority filling the middle: every minority base
    // neighborhood is pure majority, so the flexible rule fires for both.
    const Dataset d = line_dataset({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 10.0},
                                   {1, -1, -1, -1, -1, -1, -1, 1});
    MeasureConfig config;
    config.k0 = 3;
    const MeasureReport report = measure_dataset(d, stats_of(d), config);
    REQUIRE(report.instances.size() == 2);
    for (const auto& inst : report.instances) {
        CHECK(inst.flexible_applied);
        CHECK(inst.k == 7);
        CHECK(inst.majority_count == 6);
        CHECK(inst.ibi3_flexible == Catch::Approx(4.0 / 21.0).epsilon(1e-12));
        CHECK(inst.ibi3_fixed == 0.0);
        CHECK(inst.kdn == 1.0);
    }
    CHECK(report.bi3 == Catch::Approx(4.0 / 21.0).epsilon(1e-12));
    CHECK(report.bi3_flexible == Catch::Approx(4.0 / 21.0).epsilon(1e-12));
    CHECK(report.bi3_fixed == 0.0);
    CHECK(report.mean_kdn == 1.0);
    CHECK(report.cm == Catch::Approx(2.0 / 8.0).epsilon(1e-12));
    CHECK(report.imbalance_ratio == Catch::Approx(3.0));
    CHECK(report.mean_cl > 0.0);
    CHECK(report.mean_cl < 1.0);

    MeasureConfig fixed_only = config;
    fixed_only.flexible = false;
    const MeasureReport fixed_report = measure_dataset(d, stats_of(d), fixed_only);
    CHECK(fixed_report.bi3 == 0.0);
    CHECK(fixed_report.bi3_flexible == Catch::Approx(4.0 / 21.0).epsilon(1e-12));
}

TEST_CASE("dataset measurement on a plain example") {
    const Dataset d = line_dataset({0.0, 0.5, 1.0, 2.0, 3.0}, {1, 1, -1, -1, -1});
    MeasureConfig config;
    config.k0 = 3;
    const MeasureReport report = measure_dataset(d, stats_of(d), config);
    REQUIRE(report.instances.size() == 2);
    // both minority rows see neighbors (p, n, n): M=2, k=3, r=1.5
    const double expected = ibi3_from_counts(2, 3, 1.5);
    CHECK(report.bi3 == Catch::Approx(expected).epsilon(1e-12));
    CHECK(report.bi3_fixed == Catch::Approx(expected).epsilon(1e-12));
    CHECK(report.mean_kdn == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    for (const auto& inst : report.instances) {
        CHECK_FALSE(inst.flexible_applied);
        CHECK_FALSE(inst.skipped);
    }
}

TEST_CASE("dataset measurement is stable across thread counts") {
    std::vector<double> xs;
    std::vector<int> labels;
    Rng rng(77);
    for (int i = 0; i < 120; ++i) {
        xs.push_back(rng.normal());
        labels.push_back(i < 20 ? 1 : -1);
    }
    const Dataset d = line_dataset(xs, labels);
    MeasureConfig serial;
    MeasureConfig threaded;
    threaded.threads = 4;
    const MeasureReport a = measure_dataset(d, stats_of(d), serial);
    const MeasureReport b = measure_dataset(d, stats_of(d), threaded);
    REQUIRE(a.instances.size() == b.instances.size());
    CHECK(a.bi3 == b.bi3);
    CHECK(a.mean_cl == b.mean_cl);
    CHECK(a.cm == b.cm);
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
        CHECK(a.instances[i].ibi3 == b.instances[i].ibi3);
    }
}

TEST_CASE("dataset measurement requires two minority samples") {
    const Dataset d = line_dataset({0.0, 1.0, 2.0, 3.0}, {1, -1, -1, -1});
    CHECK_THROWS_AS(measure_dataset(d, stats_of(d), MeasureConfig{}), PreconditionError);
}

TEST_CASE("gaussian class model fits mean and unbiased covariance") {
    FeatureSchema schema{{Column{"x", ColumnKind::numeric, {}},
                          Column{"y", ColumnKind::numeric, {}}}};
    const Dataset d(schema, {0.0, 1.0, 2.0, 3.0, 5.0, 5.0, 7.0, 7.0}, {1, 1, -1, -1},
                    "p", "n");
    const GaussianClassModel model = fit_gaussian_class(d, 1);
    REQUIRE(model.dim() == 2);
    CHECK(model.mean[0] == Catch::Approx(1.0));
    CHECK(model.mean[1] == Catch::Approx(2.0));
    CHECK(model.covariance[0] == Catch::Approx(2.0));  // var of {0,2}
    CHECK(model.covariance[1] == Catch::Approx(2.0));  // cov, perfectly correlated
    CHECK(model.covariance[3] == Catch::Approx(2.0));
    // the fitted covariance is singular, so the density must refuse
    CHECK_THROWS_AS(log_gaussian_density(model, std::vector<double>{0.0, 0.0}),
                    PreconditionError);
}

TEST_CASE("gaussian log density matches the standard normal at the mean") {
    GaussianClassModel model;
    model.mean = {0.0};
    model.covariance = {1.0};
    const double expected = -0.5 * std::log(2.0 * std::numbers::pi);
    CHECK(log_gaussian_density(model, std::vector<double>{0.0}) ==
          Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("closed-form posterior difference: symmetric crossing point") {
    // minority N(0,1) and majority N(2,1) meet at x=1 where both densities are
    // equal; with r=5 the score is 1/2 - 1/6 = 1/3 exactly.
    GaussianClassModel minority;
    minority.mean = {0.0};
    minority.covariance = {1.0};
    GaussianClassModel majority;
    majority.mean = {2.0};
    majority.covariance = {1.0};
    CHECK(gaussian_ibi3(minority, majority, std::vector<double>{1.0}, 100, 500) ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_ibi3(minority, majority, std::vector<double>{1.0}, 500, 100),
                    PreconditionError);
}
