#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bi3/error.hpp"

namespace bi3 {
namespace detail {

// In-place Cholesky factorization of a symmetric row-major d x d matrix.
// On success the lower triangle holds L with A = L L^T; returns false when
// the matrix is not positive definite.
inline bool cholesky_factor(std::vector<double>& a, std::size_t d) {
    // Pivots are compared against a relative floor so that matrices which are
    // singular up to rounding (pivot ~ 1e-16 * scale) are rejected instead of
    // producing a wildly ill-conditioned factor.
    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, std::abs(a[i * d + i]));
    const double floor = scale * 1e-12;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i * d + j];
            for (std::size_t k = 0; k < j; ++k) sum -= a[i * d + k] * a[j * d + k];
            if (i == j) {
                if (sum <= floor || !std::isfinite(sum)) return false;
                a[i * d + i] = std::sqrt(sum);
            } else {
                a[i * d + j] = sum / a[j * d + j];
            }
        }
        for (std::size_t j = i + 1; j < d; ++j) a[i * d + j] = 0.0;
    }
    return true;
}

// Solves L y = x for lower-triangular L (forward substitution), in place.
inline void solve_lower(const std::vector<double>& L, std::size_t d, std::vector<double>& x) {
    for (std::size_t i = 0; i < d; ++i) {
        double sum = x[i];
        for (std::size_t k = 0; k < i; ++k) sum -= L[i * d + k] * x[k];
        x[i] = sum / L[i * d + i];
    }
}

// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail
}  // namespace bi3
