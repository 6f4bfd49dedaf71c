#pragma once

// Exact reference computations: RLE cost, greedy LZ77 symbol count, distinct
// substring counts and distinct colors. These are the ground truth every estimator is
// checked against, and they read the whole string.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "sublinear/string_access.hpp"
#include "sublinear/suffix_automaton.hpp"

namespace sublinear {

/// ceil(log2(x)) for x >= 1.
constexpr std::uint64_t ceil_log2(std::uint64_t x) noexcept {
    return x <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(x - 1));
}

/// Bits for one run of length `length`: ceil(log2(length+1)) + ceil(log2|Sigma|).
constexpr std::uint64_t run_cost_bits(std::uint64_t length, std::uint64_t alphabet_size) noexcept {
    return ceil_log2(length + 1) + ceil_log2(alphabet_size);
}

/// Per-position share of a run's cost, c(t) = run_cost_bits(l(t)) / l(t).
inline double cost_contribution(std::uint64_t length, std::uint64_t alphabet_size) noexcept {
    return static_cast<double>(run_cost_bits(length, alphabet_size)) / static_cast<double>(length);
}

/// max over l >= length of c(l). The ceiling makes c jump up at every power of two and
/// decrease in between, so the maximum sits at `length` or at the next power of two.
inline double tail_cost_contribution(std::uint64_t length, std::uint64_t alphabet_size) noexcept {
    return std::max(cost_contribution(length, alphabet_size),
                    cost_contribution(std::bit_ceil(length), alphabet_size));
}

/// One run (RLE) or compressed segment (LZ77). start and source are 1-based; source is
/// the earlier position a segment copies from, 0 for literals and RLE runs.
struct Segment {
    std::size_t start = 0;
    std::size_t length = 0;
    std::uint64_t cost = 0;
    std::size_t source = 0;

    bool operator==(const Segment&) const = default;
};

struct CostBreakdown {
    std::uint64_t total_cost = 0;
    std::vector<Segment> parts;
};

inline CostBreakdown exact_rle_cost(std::span<const Symbol> w, std::size_t alphabet_size) {
    if (w.empty()) throw std::invalid_argument("exact_rle_cost: empty string");
    if (alphabet_size < 2) throw std::invalid_argument("exact_rle_cost: alphabet size must be >= 2");
    if (count_distinct(w) > alphabet_size) {
        throw std::invalid_argument("exact_rle_cost: symbols exceed alphabet size");
    }
    CostBreakdown out;
    std::size_t i = 0;
    while (i < w.size()) {
        std::size_t j = i + 1;
        while (j < w.size() && w[j] == w[i]) ++j;
        const std::size_t len = j - i;
        const std::uint64_t cost = run_cost_bits(len, alphabet_size);
        out.parts.push_back(Segment{i + 1, len, cost, 0});
        out.total_cost += cost;
        i = j;
    }
    return out;
}

/// Greedy LZ77 with self-overlapping sources. Each step takes the longest w_t..w_{t+l-1}
/// that also starts at some p < t (leftmost such p), or a literal if w_t is new.
/// total_cost is the number of emitted symbols C_LZ(w).
///
/// The leftmost earlier occurrence of a prefix can only move right as the prefix grows,
/// so walking the suffix automaton from w_t while the first occurrence still starts
/// before t gives both the length and the leftmost source in O(l) steps.
inline CostBreakdown exact_lz_cost(std::span<const Symbol> w) {
    if (w.empty()) throw std::invalid_argument("exact_lz_cost: empty string");
    const detail::SuffixAutomaton sam(w);
    CostBreakdown out;
    std::size_t t = 0;
    while (t < w.size()) {
        int state = 0;
        std::size_t len = 0;
        std::size_t source = 0;
        while (t + len < w.size()) {
            const int next = sam.transition(state, w[t + len]);
            if (next < 0) break;
            const std::size_t first_start = sam.state(next).first_end - len;
            if (first_start >= t) break;
            state = next;
            ++len;
            source = first_start;
        }
        if (len == 0) {
            out.parts.push_back(Segment{t + 1, 1, 1, 0});
            t += 1;
        } else {
            out.parts.push_back(Segment{t + 1, len, 1, source + 1});
            t += len;
        }
        out.total_cost += 1;
    }
    return out;
}

/// Rebuilds the string from an LZ77 parse; `literals` holds the symbols of the literal
/// segments in order. Used to check the decompression identity.
inline std::vector<Symbol> expand_lz(const CostBreakdown& parse, std::span<const Symbol> literals) {
    std::vector<Symbol> out;
    std::size_t next_literal = 0;
    for (const auto& seg : parse.parts) {
        if (seg.source == 0) {
            if (next_literal >= literals.size()) throw std::invalid_argument("expand_lz: too few literals");
            out.push_back(literals[next_literal++]);
            continue;
        }
        for (std::size_t i = 0; i < seg.length; ++i) out.push_back(out[seg.source - 1 + i]);
    }
    return out;
}

/// d_l(w) for every l in [1, max_len]; index 0 is unused.
inline std::vector<std::size_t> exact_distinct_profile(std::span<const Symbol> w, std::size_t max_len) {
    if (w.empty()) throw std::invalid_argument("exact_distinct_profile: empty string");
    if (max_len > w.size()) throw std::invalid_argument("exact_distinct_profile: length exceeds n");
    return detail::SuffixAutomaton(w).distinct_profile(max_len);
}

inline std::size_t exact_distinct_substrings(std::span<const Symbol> w, std::size_t ell) {
    if (ell < 1 || ell > w.size()) {
        throw std::invalid_argument("exact_distinct_substrings: need 1 <= ell <= n");
    }
    return exact_distinct_profile(w, ell)[ell];
}

inline std::size_t exact_color_count(std::span<const Symbol> tau) {
    if (tau.empty()) throw std::invalid_argument("exact_color_count: empty string");
    return count_distinct(tau);
}

// ---------------------------------------------------------------------------
// Structural lemma verification

struct InequalityCheck {
    std::string name;  // "distinct-lower-bound", "lz-upper-bound", "segment-mass"
    std::size_t ell = 0;
    double lhs = 0;
    double rhs = 0;
    bool holds = true;
};

struct StructuralLemmaReport {
    std::uint64_t lz_cost = 0;
    std::size_t ell0 = 0;
    double m = 0;                             // max_{l <= ell0} d_l / l
    std::vector<std::size_t> distinct;        // d_l, index l in [1, ell0]
    std::vector<std::size_t> segment_counts;  // n_k, index k in [1, n], last segment excluded
    std::vector<InequalityCheck> checks;

    bool all_hold() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
    }
};

/// Checks, on one string:
///  (a) d_l <= C_LZ * l for every l in [ell0];
///  (b) C_LZ <= 4 (m log2 ell0 + n / ell0), skipped for ell0 = 1;
///  (c) sum_{k<=l} k n_k <= 2 l (m + 1) for every l <= floor(ell0 / 2).
/// These are theorems, so any failed check points at a bug in the oracles.
inline StructuralLemmaReport verify_structural_lemmas(std::span<const Symbol> w, std::size_t ell0) {
    if (ell0 < 1 || ell0 > w.size()) throw std::invalid_argument("verify_structural_lemmas: need 1 <= ell0 <= n");
    const double n = static_cast<double>(w.size());
    StructuralLemmaReport report;
    report.ell0 = ell0;
    const CostBreakdown parse = exact_lz_cost(w);
    report.lz_cost = parse.total_cost;
    report.distinct = exact_distinct_profile(w, ell0);
    for (std::size_t l = 1; l <= ell0; ++l) {
        report.m = std::max(report.m, static_cast<double>(report.distinct[l]) / static_cast<double>(l));
    }
    report.segment_counts.assign(w.size() + 1, 0);
    for (std::size_t i = 0; i + 1 < parse.parts.size(); ++i) ++report.segment_counts[parse.parts[i].length];

    const double cost = static_cast<double>(report.lz_cost);
    for (std::size_t l = 1; l <= ell0; ++l) {
        const double lhs = static_cast<double>(report.distinct[l]);
        const double rhs = cost * static_cast<double>(l);
        report.checks.push_back({"distinct-lower-bound", l, lhs, rhs, lhs <= rhs});
    }
    if (ell0 >= 2) {
        const double rhs = 4.0 * (report.m * std::log2(static_cast<double>(ell0)) + n / static_cast<double>(ell0));
        report.checks.push_back({"lz-upper-bound", ell0, cost, rhs, cost <= rhs});
    }
    double mass = 0;
    for (std::size_t l = 1; l <= ell0 / 2; ++l) {
        mass += static_cast<double>(l * report.segment_counts[l]);
        const double rhs = 2.0 * static_cast<double>(l) * (report.m + 1.0);
        report.checks.push_back({"segment-mass", l, mass, rhs, mass <= rhs});
    }
    return report;
}

}  // namespace sublinear
