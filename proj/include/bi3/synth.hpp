#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bi3/csv.hpp"
#include "bi3/dataset.hpp"
#include "bi3/error.hpp"
#include "bi3/rng.hpp"

namespace bi3 {

// 2 x 2 covariance [[v00, v01], [v01, v11]].
struct CovarianceSpec {
    double v00 = 1.0, v01 = 0.0, v11 = 1.0;

    bool positive_definite() const { return v00 > 0.0 && v00 * v11 - v01 * v01 > 0.0; }
};

// Draws sigma_00, sigma_11 ~ U[0,1) and sigma_01 ~ U[-1,1), adds 0.1 to the
// diagonal, and redraws until the matrix is positive definite.
inline CovarianceSpec random_covariance(Rng& rng, std::size_t max_attempts = 1000) {
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        const double s00 = rng.uniform();
        const double s11 = rng.uniform();
        const double s01 = rng.uniform(-1.0, 1.0);
        const CovarianceSpec cov{s00 + 0.1, s01, s11 + 0.1};
        if (cov.positive_definite()) return cov;
    }
    throw Error("random_covariance: retry bound exceeded");
}

enum class SynthFamily { overlap, noise };

struct SyntheticSpec {
    SynthFamily family = SynthFamily::overlap;
    std::size_t n_pos = 100;
    std::size_t ir = 5;        // n_neg = n_pos * ir
    double dist = 2.0;         // minority mean is (dist, 0); majority mean is (0, 0)
    double noise_rate = 0.0;   // fraction of each class size flipped (noise family)
    CovarianceSpec cov_pos, cov_neg;
    std::uint64_t seed = 0;
};

struct SynthResult {
    Dataset dataset;
    ClassStats stats;
    SyntheticSpec spec;
    // Rows whose label was flipped by the noise step (empty for the overlap family).
    std::vector<std::size_t> flipped_to_negative;  // born minority, now -1
    std::vector<std::size_t> flipped_to_positive;  // born majority, now +1
};

namespace detail {

struct Cholesky2x2 {
    double l00, l10, l11;
};

inline Cholesky2x2 cholesky_2x2(const CovarianceSpec& cov) {
    if (!cov.positive_definite()) {
        throw PreconditionError("covariance must be positive definite");
    }
    const double l00 = std::sqrt(cov.v00);
    const double l10 = cov.v01 / l00;
    return Cholesky2x2{l00, l10, std::sqrt(cov.v11 - l10 * l10)};
}

inline void sample_gaussian_2d(Rng& rng, const Cholesky2x2& chol, double mean_x,
                               std::vector<double>& values) {
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    values.push_back(mean_x + chol.l00 * z0);
    values.push_back(chol.l10 * z0 + chol.l11 * z1);
}

}  // namespace detail

// Two overlapping 2-D Gaussian clouds: majority at (0, 0), minority at
// (dist, 0), n_neg = ir * n_pos.  Majority rows come first.
inline SynthResult gen_overlap(std::size_t ir, double dist, const CovarianceSpec& cov_pos,
                               const CovarianceSpec& cov_neg, std::uint64_t seed,
                               std::size_t n_pos = 100) {
    if (ir < 1) throw PreconditionError("gen_overlap: ir must be >= 1");
    if (n_pos < 2) throw PreconditionError("gen_overlap: n_pos must be >= 2");
    if (dist < 0.0) throw PreconditionError("gen_overlap: dist must be >= 0");
    const auto chol_neg = detail::cholesky_2x2(cov_neg);
    const auto chol_pos = detail::cholesky_2x2(cov_pos);
    const std::size_t n_neg = n_pos * ir;

    Rng rng(seed);
    std::vector<double> values;
    values.reserve(2 * (n_neg + n_pos));
    std::vector<int> labels;
    labels.reserve(n_neg + n_pos);
    for (std::size_t i = 0; i < n_neg; ++i) {
        detail::sample_gaussian_2d(rng, chol_neg, 0.0, values);
        labels.push_back(-1);
    }
    for (std::size_t i = 0; i < n_pos; ++i) {
        detail::sample_gaussian_2d(rng, chol_pos, dist, values);
        labels.push_back(1);
    }

    FeatureSchema schema{{Column{"x1", ColumnKind::numeric, {}}, Column{"x2", ColumnKind::numeric, {}}}};
    Dataset dataset(std::move(schema), std::move(values), std::move(labels), "positive", "negative");
    SynthResult result{dataset, dataset.class_stats(),
                       SyntheticSpec{SynthFamily::overlap, n_pos, ir, dist, 0.0, cov_pos, cov_neg, seed},
                       {}, {}};
    return result;
}

// Overlap family at dist = 2 plus symmetric label noise: floor(rate * n_pos)
// minority rows become -1 and the same number of majority rows become +1,
// so both class sizes are preserved.  rate = 0 reproduces gen_overlap(seed)
// exactly.
inline SynthResult gen_noise(std::size_t ir, double noise_rate, const CovarianceSpec& cov_pos,
                             const CovarianceSpec& cov_neg, std::uint64_t seed,
                             std::size_t n_pos = 100) {
    if (noise_rate < 0.0 || noise_rate >= 0.5) {
        throw PreconditionError("gen_noise: noise_rate must be in [0, 0.5)");
    }
    SynthResult result = gen_overlap(ir, 2.0, cov_pos, cov_neg, seed, n_pos);
    result.spec.family = SynthFamily::noise;
    result.spec.noise_rate = noise_rate;

    const std::size_t flips =
        static_cast<std::size_t>(std::floor(noise_rate * static_cast<double>(n_pos)));
    if (flips == 0) return result;
    const std::size_t n_neg = result.stats.n_neg;
    if (flips >= n_pos || flips >= n_neg) {
        throw PreconditionError("gen_noise: flip count reaches a whole class");
    }

    // Continue the generator stream: pick flipped minority rows, then
    // flipped majority rows, each without replacement.
    Rng rng(mix_seed(seed, 0xf11d5));
    std::vector<std::size_t> minority_rows = result.dataset.indices_of(1);
    std::vector<std::size_t> majority_rows = result.dataset.indices_of(-1);
    result.flipped_to_negative = sample_without_replacement(minority_rows, flips, rng);
    result.flipped_to_positive = sample_without_replacement(majority_rows, flips, rng);

    std::vector<int> labels = result.dataset.labels();
    for (const std::size_t r : result.flipped_to_negative) labels[r] = -1;
    for (const std::size_t r : result.flipped_to_positive) labels[r] = 1;
    Dataset flipped(result.dataset.schema(), result.dataset.values(), std::move(labels),
                    result.dataset.positive_name(), result.dataset.negative_name());
    result.dataset = std::move(flipped);
    result.stats = result.dataset.class_stats();
    return result;
}

// ---------------------------------------------------------------------------
// Benchmark grid
// ---------------------------------------------------------------------------

struct SuiteDataset {
    std::string name;
    SyntheticSpec spec;
    Dataset dataset;
    ClassStats stats;
};

inline std::string suite_cell_name(SynthFamily family, std::size_t ir, double param,
                                   std::size_t draw) {
    std::string out = "ir" + std::to_string(ir);
    if (family == SynthFamily::overlap) {
        out += "_dist" + std::to_string(static_cast<int>(param));
    } else {
        out += "_noise" + format_double(param);
    }
    out += "_c" + std::to_string(draw);
    return out;
}

inline const std::vector<std::size_t>& suite_ir_levels() {
    static const std::vector<std::size_t> levels{5, 10, 50};
    return levels;
}

inline std::vector<double> suite_param_levels(SynthFamily family) {
    if (family == SynthFamily::overlap) return {0.0, 1.0, 2.0, 3.0};
    return {0.0, 0.1, 0.2, 0.3};
}

// The full benchmark grid: 3 imbalance ratios x 4 parameter levels x
// `cov_draws` covariance pairs shared across all cells of the grid.
inline std::vector<SuiteDataset> synthetic_suite(SynthFamily family, std::uint64_t master_seed,
                                                 std::size_t cov_draws = 10) {
    Rng cov_rng(mix_seed(master_seed, 0xc07));
    std::vector<std::pair<CovarianceSpec, CovarianceSpec>> pairs;
    for (std::size_t i = 0; i < cov_draws; ++i) {
        const CovarianceSpec pos = random_covariance(cov_rng);
        const CovarianceSpec neg = random_covariance(cov_rng);
        pairs.emplace_back(pos, neg);
    }

    std::vector<SuiteDataset> suite;
    const auto params = suite_param_levels(family);
    for (std::size_t ir_i = 0; ir_i < suite_ir_levels().size(); ++ir_i) {
        const std::size_t ir = suite_ir_levels()[ir_i];
        for (std::size_t p_i = 0; p_i < params.size(); ++p_i) {
            for (std::size_t draw = 0; draw < pairs.size(); ++draw) {
                const std::uint64_t cell_seed =
                    mix_seed(master_seed, {0xce11, ir_i, p_i, draw});
                SynthResult r = family == SynthFamily::overlap
                                    ? gen_overlap(ir, params[p_i], pairs[draw].first,
                                                  pairs[draw].second, cell_seed)
                                    : gen_noise(ir, params[p_i], pairs[draw].first,
                                                pairs[draw].second, cell_seed);
                suite.push_back(SuiteDataset{suite_cell_name(family, ir, params[p_i], draw),
                                             r.spec, std::move(r.dataset), r.stats});
            }
        }
    }
    return suite;
}

}  // namespace bi3
