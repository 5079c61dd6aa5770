#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "bi3/synth.hpp"

using namespace bi3;

TEST_CASE("random covariances are positive definite with padded diagonals") {
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        const CovarianceSpec cov = random_covariance(rng);
        CHECK(cov.v00 >= 0.1);
        CHECK(cov.v11 >= 0.1);
        CHECK(cov.v00 * cov.v11 - cov.v01 * cov.v01 > 0.0);
        CHECK(cov.positive_definite());
    }
}

TEST_CASE("overlap generation layout and determinism") {
    Rng cov_rng(3);
    const CovarianceSpec cp = random_covariance(cov_rng);
    const CovarianceSpec cn = random_covariance(cov_rng);
    const SynthResult a = gen_overlap(5, 2.0, cp, cn, 42);
    const SynthResult b = gen_overlap(5, 2.0, cp, cn, 42);
    const SynthResult c = gen_overlap(5, 2.0, cp, cn, 43);

    CHECK(a.dataset.rows() == 600);
    CHECK(a.dataset.cols() == 2);
    CHECK(a.stats.n_pos == 100);
    CHECK(a.stats.n_neg == 500);
    CHECK(a.stats.imbalance_ratio == Catch::Approx(5.0));
    CHECK(a.dataset.schema().column(0).name == "x1");
    CHECK(a.dataset.schema().column(1).name == "x2");

    // majority block first, then minority
    for (std::size_t r = 0; r < 500; ++r) REQUIRE(a.dataset.label(r) == -1);
    for (std::size_t r = 500; r < 600; ++r) REQUIRE(a.dataset.label(r) == 1);

    CHECK(a.dataset.values() == b.dataset.values());
    CHECK(a.dataset.values() != c.dataset.values());
}

TEST_CASE("overlap class centers sit at the configured distance") {
    Rng cov_rng(9);
    const CovarianceSpec cp = random_covariance(cov_rng);
    const CovarianceSpec cn = random_covariance(cov_rng);
    const SynthResult r = gen_overlap(10, 3.0, cp, cn, 7, 400);
    double pos_x = 0.0, neg_x = 0.0, pos_y = 0.0;
    for (std::size_t i = 0; i < r.dataset.rows(); ++i) {
        if (r.dataset.label(i) == 1) {
            pos_x += r.dataset.value(i, 0);
            pos_y += r.dataset.value(i, 1);
        } else {
            neg_x += r.dataset.value(i, 0);
        }
    }
    pos_x /= 400.0;
    pos_y /= 400.0;
    neg_x /= 4000.0;
    CHECK(pos_x == Catch::Approx(3.0).margin(0.25));
    CHECK(pos_y == Catch::Approx(0.0).margin(0.25));
    CHECK(neg_x == Catch::Approx(0.0).margin(0.25));
}

TEST_CASE("sampled covariance matches the requested one") {
    CovarianceSpec cov{0.8, -0.3, 0.5};
    CovarianceSpec unit{1.0, 0.0, 1.0};
    const SynthResult r = gen_overlap(1, 0.0, cov, unit, 11, 20000);
    // use the minority block (first Gaussian drawn after the majority block is
    // irrelevant here; both use their own spec)
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const auto pos = r.dataset.indices_of(1);
    for (const std::size_t i : pos) {
        const double x = r.dataset.value(i, 0), y = r.dataset.value(i, 1);
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
    }
    const double n = static_cast<double>(pos.size());
    const double mx = sx / n, my = sy / n;
    CHECK(sxx / n - mx * mx == Catch::Approx(0.8).margin(0.05));
    CHECK(syy / n - my * my == Catch::Approx(0.5).margin(0.05));
    CHECK(sxy / n - mx * my == Catch::Approx(-0.3).margin(0.05));
}

TEST_CASE("zero noise reproduces the distance-2 overlap sample exactly") {
    Rng cov_rng(5);
    const CovarianceSpec cp = random_covariance(cov_rng);
    const CovarianceSpec cn = random_covariance(cov_rng);
    const SynthResult base = gen_overlap(10, 2.0, cp, cn, 99);
    const SynthResult noisy = gen_noise(10, 0.0, cp, cn, 99);
    CHECK(noisy.dataset.values() == base.dataset.values());
    CHECK(noisy.dataset.labels() == base.dataset.labels());
    CHECK(noisy.flipped_to_negative.empty());
    CHECK(noisy.flipped_to_positive.empty());
}

TEST_CASE("label noise flips a fixed count in each direction") {
    Rng cov_rng(5);
    const CovarianceSpec cp = random_covariance(cov_rng);
    const CovarianceSpec cn = random_covariance(cov_rng);
    const SynthResult base = gen_overlap(10, 2.0, cp, cn, 99);
    const SynthResult noisy = gen_noise(10, 0.2, cp, cn, 99);

    CHECK(noisy.dataset.values() == base.dataset.values());  // features untouched
    CHECK(noisy.flipped_to_negative.size() == 20);           // floor(0.2 * 100)
    CHECK(noisy.flipped_to_positive.size() == 20);
    CHECK(noisy.stats.n_pos == 100);                         // counts preserved
    CHECK(noisy.stats.n_neg == 1000);

    std::size_t differing = 0;
    for (std::size_t i = 0; i < base.dataset.rows(); ++i) {
        if (base.dataset.label(i) != noisy.dataset.label(i)) ++differing;
    }
    CHECK(differing == 40);
    for (const std::size_t i : noisy.flipped_to_negative) {
        CHECK(base.dataset.label(i) == 1);
        CHECK(noisy.dataset.label(i) == -1);
    }
    for (const std::size_t i : noisy.flipped_to_positive) {
        CHECK(base.dataset.label(i) == -1);
        CHECK(noisy.dataset.label(i) == 1);
    }
}

TEST_CASE("generator argument validation") {
    CovarianceSpec unit{1.0, 0.0, 1.0};
    CHECK_THROWS_AS(gen_overlap(0, 2.0, unit, unit, 1), PreconditionError);
    CHECK_THROWS_AS(gen_overlap(5, -1.0, unit, unit, 1), PreconditionError);
    CHECK_THROWS_AS(gen_overlap(5, 2.0, unit, unit, 1, 1), PreconditionError);
    CHECK_THROWS_AS(gen_noise(5, 0.5, unit, unit, 1), PreconditionError);
    CHECK_THROWS_AS(gen_noise(5, -0.1, unit, unit, 1), PreconditionError);
}

TEST_CASE("suite enumeration covers the ir-by-parameter grid in order") {
    const auto suite = synthetic_suite(SynthFamily::overlap, 123, 2);
    REQUIRE(suite.size() == 3 * 4 * 2);
    CHECK(suite[0].name == "ir5_dist0_c0");
    CHECK(suite[1].name == "ir5_dist0_c1");
    CHECK(suite[2].name == "ir5_dist1_c0");
    CHECK(suite[8].name == "ir10_dist0_c0");
    CHECK(suite[16].name == "ir50_dist0_c0");
    CHECK(suite.back().name == "ir50_dist3_c1");

    std::set<std::string> names;
    for (const auto& item : suite) {
        names.insert(item.name);
        CHECK(item.stats.n_pos == 100);
        CHECK(item.dataset.rows() == 100 + 100 * item.spec.ir);
    }
    CHECK(names.size() == suite.size());

    // one covariance pair per draw index, shared across every grid cell
    for (const auto& item : suite) {
        const auto& ref = item.name.back() == '0' ? suite[0] : suite[1];
        CHECK(item.spec.cov_pos.v00 == ref.spec.cov_pos.v00);
        CHECK(item.spec.cov_neg.v11 == ref.spec.cov_neg.v11);
    }
}

TEST_CASE("noise suite names carry the rate") {
    const auto suite = synthetic_suite(SynthFamily::noise, 123, 1);
    REQUIRE(suite.size() == 12);
    CHECK(suite[0].name == "ir5_noise0_c0");
    CHECK(suite[1].name == "ir5_noise0.1_c0");
    CHECK(suite[2].name == "ir5_noise0.2_c0");
    CHECK(suite[3].name == "ir5_noise0.3_c0");
}

TEST_CASE("suite generation is reproducible") {
    const auto a = synthetic_suite(SynthFamily::overlap, 7, 2);
    const auto b = synthetic_suite(SynthFamily::overlap, 7, 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].dataset.values() == b[i].dataset.values());
    }
}
