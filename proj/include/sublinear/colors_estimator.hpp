#pragma once

// lambda-approximation for the number of distinct symbols ("colors") in a string:
// sample ceil(10 n / lambda^2) positions with replacement, count distinct values, scale
// by lambda.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "sublinear/random.hpp"
#include "sublinear/string_access.hpp"

namespace sublinear {

struct ColorSample {
    std::size_t sample_size = 0;
    std::size_t distinct_seen = 0;
    double lambda = 0.0;
};

inline std::size_t colors_sample_size(std::size_t n, double lambda) {
    return static_cast<std::size_t>(std::ceil(10.0 * static_cast<double>(n) / (lambda * lambda) - 1e-9));
}

/// Median-amplification run count, max(1, ceil(18 ln(1/delta))).
inline std::size_t amplification_runs(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(18.0 * std::log(1.0 / delta))));
}

/// Lower median; the result is always one of the inputs.
template <typename T>
T lower_median(std::vector<T> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

namespace detail {

inline void require_lambda(double lambda) {
    if (!(lambda > 1.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must exceed 1");
}

}  // namespace detail

/// The distinct count in the sample never exceeds the true count, so the output is at
/// most lambda * C on every run.
inline EstimateReport colors_estimate(QueryCountedString& tau, double lambda, std::uint64_t seed,
                                      ColorSample* sample_out = nullptr) {
    detail::require_lambda(lambda);
    const std::size_t n = tau.length();
    const std::size_t s = colors_sample_size(n, lambda);
    const std::uint64_t before = tau.queries();

    Rng rng(seed);
    std::unordered_set<Symbol> seen;
    seen.reserve(std::min(s, n));
    for (std::size_t i = 0; i < s; ++i) seen.insert(tau.read(uniform_index(rng, 1, n)));

    EstimateReport report;
    report.algorithm = "colors";
    report.estimate = static_cast<double>(seen.size()) * lambda;
    report.lambda = lambda;
    report.epsilon = 0.0;
    report.seed = seed;
    report.n = n;
    report.query_ceiling = s;
    report.queries_used = tau.queries() - before;
    if (sample_out) *sample_out = ColorSample{s, seen.size(), lambda};
    return report;
}

/// Median of amplification_runs(delta) independent runs; success >= 1 - delta.
inline EstimateReport colors_estimate_amplified(QueryCountedString& tau, double lambda, double delta,
                                                std::uint64_t seed) {
    detail::require_lambda(lambda);
    const std::size_t runs = amplification_runs(delta);
    const std::uint64_t before = tau.queries();
    std::vector<double> outputs;
    outputs.reserve(runs);
    std::uint64_t ceiling = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        const EstimateReport one = colors_estimate(tau, lambda, derive_seed(seed, r));
        outputs.push_back(one.estimate);
        ceiling += one.query_ceiling;
    }
    EstimateReport report;
    report.algorithm = "colors-amplified";
    report.estimate = lower_median(std::move(outputs));
    report.lambda = lambda;
    report.epsilon = 0.0;
    report.confidence = 1.0 - delta;
    report.seed = seed;
    report.n = tau.length();
    report.rounds = runs;
    report.query_ceiling = ceiling;
    report.queries_used = tau.queries() - before;
    return report;
}

}  // namespace sublinear
