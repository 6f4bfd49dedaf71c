#pragma once

// Sublinear estimators for the run-length encoding cost C_rle(w):
//   rle_additive_estimate      eps*n-additive, samples + bounded run probes
//   rle_bucketed_estimate      (3, eps), run lengths bucketed by powers of two
//   rle_multiplicative_search  4-multiplicative, shrinking-eps search over the above
//   rle_refined_search         (1+gamma)-multiplicative, finer geometric buckets

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sublinear/exact_oracles.hpp"
#include "sublinear/random.hpp"
#include "sublinear/string_access.hpp"

namespace sublinear {

/// Hidden constants of the sample-size formulas.
struct RleConfig {
    double additive_sample_constant = 8.0;   // q = ceil(c / eps^2)
    double bucketed_sample_constant = 64.0;  // q = ceil(c log(1/eps) loglog(1/eps) / eps) * ceil(log2(3/delta))
    std::size_t max_search_rounds = 64;
};

/// Outcome of probing the run around one position.
struct RunProbe {
    std::size_t position = 0;
    std::optional<std::size_t> run_length;  // nullopt: the run has length >= cap
    double cost_contribution = 0.0;         // c(t) when exact, 0 otherwise
    std::uint64_t reads = 0;
};

/// Determines the length of the run containing t, exactly if it is below `cap`.
/// Expands left first, then right, and stops as soon as `cap` equal symbols are
/// confirmed. Performs at most cap + 2 reads.
inline RunProbe probe_run_length(QueryCountedString& w, std::size_t t, std::size_t cap) {
    if (cap < 1) throw std::invalid_argument("probe_run_length: cap must be >= 1");
    RunProbe probe;
    probe.position = t;
    const Symbol center = w.read(t);
    probe.reads = 1;
    std::size_t length = 1;
    for (std::size_t p = t; p > 1 && length < cap; --p) {
        ++probe.reads;
        if (w.read(p - 1) != center) break;
        ++length;
    }
    for (std::size_t p = t + 1; p <= w.length() && length < cap; ++p) {
        ++probe.reads;
        if (w.read(p) != center) break;
        ++length;
    }
    if (length < cap) {
        probe.run_length = length;
        probe.cost_contribution = cost_contribution(length, w.alphabet_size());
    }
    return probe;
}

/// ell0 = ceil(8 log2(4|Sigma|/eps) / eps): runs at least this long are ignored.
inline std::size_t additive_run_cap(double epsilon, std::size_t alphabet_size) {
    return static_cast<std::size_t>(
        std::ceil(8.0 * std::log2(4.0 * static_cast<double>(alphabet_size) / epsilon) / epsilon));
}

inline std::size_t additive_sample_count(double epsilon, const RleConfig& config = {}) {
    return static_cast<std::size_t>(std::ceil(config.additive_sample_constant / (epsilon * epsilon)));
}

namespace detail {

inline void require_open_unit(double value, const char* name) {
    if (!(value > 0.0 && value < 1.0)) throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

// Reads the whole string; the degenerate path of every RLE estimator.
inline std::uint64_t read_all_exact_rle(QueryCountedString& w) {
    std::vector<Symbol> all(w.length());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = w.read(i + 1);
    return exact_rle_cost(all, w.alphabet_size()).total_cost;
}

}  // namespace detail

inline EstimateReport rle_additive_estimate(QueryCountedString& w, double epsilon, std::uint64_t seed,
                                            const RleConfig& config = {}) {
    detail::require_open_unit(epsilon, "epsilon");
    const std::size_t n = w.length();
    const std::size_t sigma = w.alphabet_size();
    const std::size_t cap = additive_run_cap(epsilon, sigma);
    // Ignored indices sit in runs of length >= cap and each costs at most eps/2.
    if (tail_cost_contribution(cap, sigma) > epsilon / 2.0) {
        throw std::logic_error("rle_additive_estimate: run cap too small for epsilon");
    }
    const std::size_t q = additive_sample_count(epsilon, config);

    EstimateReport report;
    report.algorithm = "rle-additive";
    report.lambda = 1.0;
    report.epsilon = epsilon;
    report.seed = seed;
    report.n = n;
    report.query_ceiling = detail::saturating_mul(q, 2 * cap + 1);
    const std::uint64_t before = w.queries();

    if (n < cap || q >= n) {
        report.estimate = static_cast<double>(detail::read_all_exact_rle(w));
        report.exhaustive = true;
        report.query_ceiling = std::max<std::uint64_t>(report.query_ceiling, n);
    } else {
        Rng rng(seed);
        double sum = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            sum += probe_run_length(w, uniform_index(rng, 1, n), cap).cost_contribution;
        }
        report.estimate = static_cast<double>(n) * sum / static_cast<double>(q);
    }
    report.queries_used = w.queries() - before;
    return report;
}

// ---------------------------------------------------------------------------
// Bucketed estimation

/// One bucket B_h = {t : min_length <= l(t) < end_length}.
struct BucketRow {
    std::size_t h = 0;
    std::size_t min_length = 0;
    std::size_t end_length = 0;
    double weight = 0.0;  // c(min_length); (h+s)/2^(h-1) for doubling buckets
    std::size_t samples = 0;  // q_h
    std::size_t hits = 0;
    double beta = 0.0;  // hits / q_h

    bool empty() const noexcept { return min_length >= end_length; }
};

struct BucketTable {
    std::size_t h0 = 0;
    std::size_t s = 0;  // ceil(log2 |Sigma|)
    std::size_t q = 0;
    double ratio = 2.0;
    bool exhaustive = false;
    std::vector<BucketRow> rows;
};

namespace detail {

// ceil(ratio^e), exact for ratio 2.
inline std::size_t ceil_power(double ratio, std::size_t e) {
    if (ratio == 2.0) return std::size_t{1} << e;
    return static_cast<std::size_t>(std::ceil(std::pow(ratio, static_cast<double>(e)) * (1.0 - 1e-12)));
}

}  // namespace detail

/// Bucket boundaries for runs shorter than ell0 with geometric ratio `ratio`, weights
/// filled in, sample fields left zero.
///
/// Boundaries are ceil(ratio^h) for h = 0..ceil(log_ratio ell0), plus every power of two
/// in that range, so ceil(log2(l+1)) is constant inside a bucket and the weight
/// c(min_length) lies in [c(l), ratio * c(l)) for every l in it. For ratio 2 the powers of
/// two are already boundaries.
inline BucketTable bucket_layout(double epsilon, std::size_t alphabet_size, double ratio = 2.0) {
    if (!(ratio > 1.0)) throw std::invalid_argument("bucket ratio must exceed 1");
    BucketTable table;
    table.ratio = ratio;
    table.s = ceil_log2(alphabet_size);
    const std::size_t ell0 = additive_run_cap(epsilon, alphabet_size);
    const std::size_t levels =
        std::max<std::size_t>(1, ratio == 2.0 ? ceil_log2(ell0)
                                              : static_cast<std::size_t>(std::ceil(
                                                    std::log(static_cast<double>(ell0)) / std::log(ratio))));
    std::vector<std::size_t> bounds;
    for (std::size_t h = 0; h <= levels; ++h) bounds.push_back(detail::ceil_power(ratio, h));
    const std::size_t top = bounds.back();
    for (std::size_t p = 1; p < top; p *= 2) bounds.push_back(p);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        BucketRow row;
        row.h = i + 1;
        row.min_length = bounds[i];
        row.end_length = bounds[i + 1];
        row.weight = cost_contribution(row.min_length, alphabet_size);
        table.rows.push_back(row);
    }
    table.h0 = table.rows.size();
    return table;
}

/// Sample count for the bucketed estimator before per-bucket truncation. `precision`
/// is the relative accuracy wanted per large bucket; 1/2 gives the (3, eps) estimator.
inline std::size_t bucketed_sample_count(double epsilon, double delta, double precision = 0.5,
                                         const RleConfig& config = {}) {
    const double log_term = std::max(1.0, std::log2(1.0 / epsilon));
    const double loglog_term = std::max(1.0, std::log2(log_term));
    const double base = std::ceil(config.bucketed_sample_constant * log_term * loglog_term / epsilon);
    const double amplify = std::ceil(std::log2(3.0 / delta));
    const double sharpen = std::ceil(std::pow(0.5 / precision, 2.0) - 1e-9);
    const double q = base * amplify * std::max(1.0, sharpen);
    return q >= 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(q);
}

namespace detail {

inline EstimateReport bucketed_estimate(QueryCountedString& w, double epsilon, double delta, double ratio,
                                        double precision, std::uint64_t seed, const RleConfig& config,
                                        BucketTable* table_out) {
    require_open_unit(epsilon, "epsilon");
    require_open_unit(delta, "delta");
    const std::size_t n = w.length();
    const std::size_t sigma = w.alphabet_size();
    BucketTable table = bucket_layout(epsilon, sigma, ratio);
    table.q = bucketed_sample_count(epsilon, delta, precision, config);
    const std::size_t q = table.q;

    std::uint64_t ceiling = 0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        auto& row = table.rows[i];
        row.samples = row.empty() ? 0
                                  : std::min<std::size_t>(q, static_cast<std::size_t>(std::ceil(
                                                                 static_cast<double>(q) * row.weight - 1e-9)));
    }
    // Sample i takes part in bucket h iff i < q_h. Probing it with the end length of the
    // highest such bucket decides membership in all of them.
    std::vector<std::size_t> participation;  // participation[h] = max samples over buckets >= h
    participation.assign(table.rows.size() + 1, 0);
    for (std::size_t i = table.rows.size(); i-- > 0;) {
        participation[i] = std::max(participation[i + 1], table.rows[i].samples);
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::uint64_t only_here = participation[i] - participation[i + 1];
        ceiling += saturating_mul(only_here, table.rows[i].end_length + 1);
    }

    EstimateReport report;
    report.epsilon = epsilon;
    report.lambda = 3.0;
    report.confidence = 1.0 - delta;
    report.seed = seed;
    report.n = n;
    report.query_ceiling = ceiling;
    const std::uint64_t before = w.queries();

    const std::size_t ell0 = additive_run_cap(epsilon, sigma);
    if (n < ell0 || q >= n) {
        report.estimate = static_cast<double>(read_all_exact_rle(w));
        report.exhaustive = table.exhaustive = true;
        report.query_ceiling = std::max<std::uint64_t>(ceiling, n);
    } else {
        Rng rng(seed);
        const std::size_t total = participation[0];
        std::size_t top = table.rows.size();  // buckets [0, top) include the current sample
        for (std::size_t i = 0; i < total; ++i) {
            while (top > 0 && participation[top - 1] <= i) --top;
            const std::size_t t = uniform_index(rng, 1, n);
            if (top == 0) continue;
            const RunProbe probe = probe_run_length(w, t, table.rows[top - 1].end_length);
            if (!probe.run_length) continue;
            const std::size_t len = *probe.run_length;
            for (std::size_t b = 0; b < top; ++b) {
                const auto& row = table.rows[b];
                if (len >= row.min_length && len < row.end_length) {
                    if (i < row.samples) ++table.rows[b].hits;
                    break;
                }
            }
        }
        double estimate = 0.0;
        for (auto& row : table.rows) {
            if (row.samples == 0) continue;
            row.beta = static_cast<double>(row.hits) / static_cast<double>(row.samples);
            estimate += row.beta * static_cast<double>(n) * row.weight;
        }
        report.estimate = estimate;
    }
    report.queries_used = w.queries() - before;
    if (table_out) *table_out = std::move(table);
    return report;
}

}  // namespace detail

/// (3, eps)-estimate with success probability >= 1 - delta.
inline EstimateReport rle_bucketed_estimate(QueryCountedString& w, double epsilon, double delta, std::uint64_t seed,
                                            const RleConfig& config = {}, BucketTable* table = nullptr) {
    EstimateReport report = detail::bucketed_estimate(w, epsilon, delta, 2.0, 0.5, seed, config, table);
    report.algorithm = "rle-bucketed";
    return report;
}

/// Bucketed cost formula sum_h beta_h * n * weight_h evaluated with exact fractions
/// beta_h = |B_h| / n (full enumeration). Satisfies C <= value <= ratio * C whenever every
/// run is shorter than the largest bucket end.
inline double bucketed_cost_full_enumeration(std::span<const Symbol> w, std::size_t alphabet_size, double epsilon,
                                             double ratio = 2.0) {
    const BucketTable layout = bucket_layout(epsilon, alphabet_size, ratio);
    const CostBreakdown runs = exact_rle_cost(w, alphabet_size);
    double total = 0.0;
    for (const auto& run : runs.parts) {
        for (const auto& row : layout.rows) {
            if (run.length >= row.min_length && run.length < row.end_length) {
                total += static_cast<double>(run.length) * row.weight;
                break;
            }
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Searching for the cost scale

namespace detail {

struct SearchShape {
    const char* name;
    double ratio;      // bucket ratio
    double precision;  // per-bucket relative accuracy
    double lambda;     // claimed multiplicative factor of the output
    double stop_ratio; // terminate once ub / lb <= stop_ratio
    double lb_divisor;
    double ub_divisor;
};

inline EstimateReport search(QueryCountedString& w, const SearchShape& shape, std::uint64_t seed,
                             const RleConfig& config) {
    const std::size_t n = w.length();
    const std::uint64_t before = w.queries();
    EstimateReport report;
    report.algorithm = shape.name;
    report.lambda = shape.lambda;
    report.epsilon = 0.0;
    report.seed = seed;
    report.n = n;
    std::uint64_t ceiling = 0;
    for (std::size_t j = 1; j <= config.max_search_rounds; ++j) {
        const double eps = std::ldexp(1.0, -static_cast<int>(j));
        const double delta = eps / 3.0;
        const EstimateReport round = bucketed_estimate(w, eps, delta, shape.ratio, shape.precision,
                                                       derive_seed(seed, j), config, nullptr);
        ceiling = round.query_ceiling > std::numeric_limits<std::uint64_t>::max() - ceiling
                      ? std::numeric_limits<std::uint64_t>::max()
                      : ceiling + round.query_ceiling;
        const double slack = eps * static_cast<double>(n);
        const double ub = (round.estimate + slack) / shape.ub_divisor;
        const double lb = (round.estimate - slack) / shape.lb_divisor;
        report.rounds = j;
        report.exhaustive = round.exhaustive;
        // lb <= 0 makes the ratio infinite: keep shrinking eps.
        if (lb > 0.0 && ub / lb <= shape.stop_ratio) {
            report.estimate = std::sqrt(lb * ub);
            report.query_ceiling = ceiling;
            report.queries_used = w.queries() - before;
            return report;
        }
    }
    throw std::logic_error("RLE search did not terminate");
}

}  // namespace detail

/// 4-multiplicative estimate; expected queries scale with n / C_rle(w).
inline EstimateReport rle_multiplicative_search(QueryCountedString& w, std::uint64_t seed,
                                                const RleConfig& config = {}) {
    const detail::SearchShape shape{"rle-search", 2.0, 0.5, 4.0, 16.0, 3.0, 1.0 / 3.0};
    return detail::search(w, shape, seed, config);
}

/// (1+gamma)-multiplicative estimate. Buckets grow by 1+gamma/2 and each large bucket
/// is estimated to relative accuracy min(gamma/8, 1/4).
inline EstimateReport rle_refined_search(QueryCountedString& w, double gamma, std::uint64_t seed,
                                         const RleConfig& config = {}) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
    const double ratio = 1.0 + gamma / 2.0;
    const double precision = std::min(gamma / 8.0, 0.25);
    const detail::SearchShape shape{"rle-refined",       ratio,           precision,
                                    1.0 + gamma,         (1.0 + gamma) * (1.0 + gamma),
                                    ratio * (1.0 + precision), 1.0 - precision};
    return detail::search(w, shape, seed, config);
}

}  // namespace sublinear
