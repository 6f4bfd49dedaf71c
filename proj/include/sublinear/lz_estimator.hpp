#pragma once

// (A, eps)-estimator for the greedy LZ77 symbol count.
//
// C_LZ is sandwiched by m = max_{l <= ell0} d_l / l, where d_l counts distinct length-l
// substrings: m <= C_LZ <= 4 (m log ell0 + n / ell0). Each d_l is a distinct-colors
// problem over the n - l + 1 windows of length l, so it is estimated with the colors
// sampler. One sample of window starts is drawn for l = ell0 and every shorter length
// reuses the prefixes of those windows; a trie with per-depth counters then yields all
// d_l estimates from one pass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sublinear/colors_estimator.hpp"
#include "sublinear/exact_oracles.hpp"
#include "sublinear/random.hpp"
#include "sublinear/string_access.hpp"
#include "sublinear/substring_trie.hpp"

namespace sublinear {

struct LzEstimateParams {
    double A = 0.0;
    double epsilon = 0.0;
    std::size_t ell0 = 0;  // ceil(2 / (A eps)), clamped to n
    double B = 0.0;        // A / (2 sqrt(log2(2 / (A eps))))

    /// For B <= 1 the colors sampler cannot help; d_l is then counted exactly.
    bool exact_counts() const noexcept { return B <= 1.0; }
    double effective_B() const noexcept { return exact_counts() ? 1.0 : B; }

    static LzEstimateParams make(double A, double epsilon, std::size_t n) {
        if (!(A > 1.0) || !std::isfinite(A)) throw std::invalid_argument("A must exceed 1");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
        if (!(A * epsilon < 2.0)) throw std::invalid_argument("A * epsilon must be below 2");
        if (n == 0) throw std::invalid_argument("input string must be nonempty");
        LzEstimateParams p;
        p.A = A;
        p.epsilon = epsilon;
        p.ell0 = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(2.0 / (A * epsilon) - 1e-9)));
        p.ell0 = std::max<std::size_t>(p.ell0, 1);
        p.B = A / (2.0 * std::sqrt(std::log2(2.0 / (A * epsilon))));
        return p;
    }
};

/// Window starts drawn once against the longest window length and shared by every
/// shorter length. runs[r] holds the starts of amplification run r.
struct WindowSamples {
    std::size_t window = 0;
    std::size_t per_run = 0;
    std::vector<std::vector<std::size_t>> runs;
};

inline WindowSamples draw_window_samples(std::size_t n, std::size_t window, double B, double delta,
                                         std::uint64_t seed) {
    if (window < 1 || window > n) throw std::invalid_argument("window length must lie in [1, n]");
    if (!(B > 1.0)) throw std::invalid_argument("sampling needs B > 1");
    const std::size_t virtual_length = n - window + 1;
    WindowSamples samples;
    samples.window = window;
    samples.per_run = colors_sample_size(virtual_length, B);
    const std::size_t runs = amplification_runs(delta);
    samples.runs.resize(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        Rng rng(derive_seed(seed, r));
        auto& starts = samples.runs[r];
        starts.resize(samples.per_run);
        for (auto& t : starts) t = uniform_index(rng, 1, virtual_length);
    }
    return samples;
}

/// B-estimates of d_l for every l in [1, max_len], from the shared samples. Entry 0 is
/// unused. Reads only positions inside sampled windows.
inline std::vector<double> estimate_distinct_profile(QueryCountedString& w, std::size_t max_len, double B,
                                                     const WindowSamples& samples) {
    if (max_len < 1 || max_len > samples.window) {
        throw std::invalid_argument("profile length must lie in [1, sampled window]");
    }
    std::vector<std::vector<double>> per_length(max_len + 1);
    SubstringTrie trie(max_len);
    // stamp[t] == r + 1 once start t was inserted in run r; repeats add no nodes.
    std::vector<std::uint32_t> stamp(w.length() + 1, 0);
    std::uint32_t run_id = 0;
    for (const auto& run : samples.runs) {
        trie.clear();
        ++run_id;
        for (std::size_t t : run) {
            if (stamp[t] == run_id) continue;
            stamp[t] = run_id;
            trie.insert(max_len, [&](std::size_t i) { return w.read(t + i); });
        }
        for (std::size_t l = 1; l <= max_len; ++l) {
            per_length[l].push_back(static_cast<double>(trie.counter(l)) * B);
        }
    }
    std::vector<double> out(max_len + 1, 0.0);
    for (std::size_t l = 1; l <= max_len; ++l) out[l] = lower_median(per_length[l]);
    return out;
}

namespace detail {

inline std::vector<Symbol> read_all(QueryCountedString& w) {
    std::vector<Symbol> all(w.length());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = w.read(i + 1);
    return all;
}

}  // namespace detail

/// B-estimate of d_ell with confidence 1 - delta, using `samples` (which must have been
/// drawn for a window of length >= ell). For B <= 1 every window is read and the exact
/// count returned.
inline double estimate_distinct(QueryCountedString& w, std::size_t ell, double B, const WindowSamples& samples) {
    if (ell < 1 || ell > w.length()) throw std::invalid_argument("estimate_distinct: need 1 <= ell <= n");
    if (B <= 1.0) return static_cast<double>(exact_distinct_substrings(detail::read_all(w), ell));
    return estimate_distinct_profile(w, ell, B, samples)[ell];
}

inline double estimate_distinct(QueryCountedString& w, std::size_t ell, double B, double delta, std::uint64_t seed) {
    if (ell < 1 || ell > w.length()) throw std::invalid_argument("estimate_distinct: need 1 <= ell <= n");
    if (B <= 1.0) return static_cast<double>(exact_distinct_substrings(detail::read_all(w), ell));
    return estimate_distinct(w, ell, B, draw_window_samples(w.length(), ell, B, delta, seed));
}

/// Pre-dedup read budget: runs * per_run * ell0 when sampling, n when counting exactly.
inline std::uint64_t lz_query_ceiling(std::size_t n, const LzEstimateParams& params) {
    if (params.exact_counts()) return n;
    const std::uint64_t runs = amplification_runs(1.0 / (3.0 * static_cast<double>(params.ell0)));
    const std::uint64_t per_run = colors_sample_size(n - params.ell0 + 1, params.B);
    return runs * per_run * params.ell0;
}

inline EstimateReport lz_estimate(QueryCountedString& w, double A, double epsilon, std::uint64_t seed) {
    const std::size_t n = w.length();
    const LzEstimateParams params = LzEstimateParams::make(A, epsilon, n);
    const std::uint64_t before = w.queries();

    std::vector<double> d_hat;
    if (params.exact_counts()) {
        const auto exact = exact_distinct_profile(detail::read_all(w), params.ell0);
        d_hat.assign(exact.begin(), exact.end());
    } else {
        const double delta = 1.0 / (3.0 * static_cast<double>(params.ell0));
        const WindowSamples samples = draw_window_samples(n, params.ell0, params.B, delta, seed);
        d_hat = estimate_distinct_profile(w, params.ell0, params.B, samples);
    }
    double m_hat = 0.0;
    for (std::size_t l = 1; l <= params.ell0; ++l) m_hat = std::max(m_hat, d_hat[l] / static_cast<double>(l));

    EstimateReport report;
    report.algorithm = "lz";
    report.estimate = m_hat * (A / params.effective_B()) + epsilon * static_cast<double>(n);
    report.lambda = A;
    report.epsilon = epsilon;
    report.seed = seed;
    report.n = n;
    report.exhaustive = params.exact_counts();
    report.query_ceiling = lz_query_ceiling(n, params);
    report.queries_used = w.queries() - before;
    return report;
}

// ---------------------------------------------------------------------------

struct CompressibilityVerdict {
    bool compressible = false;  // LOW: below the decision threshold
    double threshold = 0.0;
    double A = 0.0;
    double epsilon = 0.0;
    EstimateReport report;
};

/// Decides between C_LZ <= lo and C_LZ >= hi with one lz_estimate run.
///
/// A = sqrt(hi/lo)/2 and eps = lo*A/n. Under those settings a string with C_LZ <= lo has
/// estimate <= A lo + eps n = sqrt(lo hi), and one with C_LZ >= hi has estimate
/// >= hi/A - eps n = 1.5 sqrt(lo hi); the threshold is the geometric midpoint.
inline CompressibilityVerdict distinguish_compressible(QueryCountedString& w, double lo, double hi,
                                                       std::uint64_t seed) {
    const double n = static_cast<double>(w.length());
    if (!(lo < hi)) throw std::invalid_argument("need threshold_lo < threshold_hi");
    if (lo < 1.0 || hi > n) throw std::invalid_argument("thresholds must lie in [1, n]");
    CompressibilityVerdict verdict;
    verdict.A = std::sqrt(hi / lo) / 2.0;
    if (verdict.A <= 1.0) throw std::invalid_argument("gap too small: need threshold_hi / threshold_lo > 4");
    verdict.epsilon = lo * verdict.A / n;
    if (!(verdict.epsilon < 1.0) || !(verdict.A * verdict.epsilon < 2.0)) {
        throw std::invalid_argument("thresholds too large for n: derived epsilon out of range");
    }
    verdict.threshold = std::sqrt(1.5) * std::sqrt(lo * hi);
    verdict.report = lz_estimate(w, verdict.A, verdict.epsilon, seed);
    verdict.report.algorithm = "lz-distinguish";
    verdict.compressible = verdict.report.estimate < verdict.threshold;
    return verdict;
}

}  // namespace sublinear
