#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "naive_oracles.hpp"
#include "sublinear/exact_oracles.hpp"
#include "sublinear/generators.hpp"
#include "sublinear/lz_estimator.hpp"
#include "sublinear/substring_trie.hpp"

using namespace sublinear;

TEST(SubstringTrie, CountersMatchDistinctPrefixes) {
    Rng rng(5);
    for (int round = 0; round < 30; ++round) {
        const std::size_t depth = 1 + round % 7;
        const std::size_t sigma = 2 + round % 3;
        SubstringTrie trie(depth);
        std::vector<std::set<std::vector<Symbol>>> prefixes(depth + 1);
        const std::size_t count = 1 + uniform_index(rng, 0, 200);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t len = uniform_index(rng, 0, depth + 2);
            std::vector<Symbol> s(len);
            for (auto& c : s) c = static_cast<Symbol>(uniform_index(rng, 0, sigma - 1));
            trie.insert(s);
            for (std::size_t l = 1; l <= std::min(len, depth); ++l) prefixes[l].emplace(s.begin(), s.begin() + l);
        }
        EXPECT_EQ(trie.inserted(), count);
        std::size_t nodes = 1;
        for (std::size_t l = 1; l <= depth; ++l) {
            EXPECT_EQ(trie.counter(l), prefixes[l].size());
            EXPECT_LE(trie.counter(l), trie.inserted());
            nodes += trie.counter(l);
        }
        EXPECT_EQ(trie.node_count(), nodes);
        trie.clear();
        EXPECT_EQ(trie.counter(1), 0u);
        EXPECT_EQ(trie.inserted(), 0u);
    }
}

TEST(LzParams, FormulaValues) {
    const auto p = LzEstimateParams::make(8.0, 0.05, 100000);
    EXPECT_EQ(p.ell0, 5u);
    EXPECT_NEAR(p.B, 8.0 / (2.0 * std::sqrt(std::log2(5.0))), 1e-12);
    EXPECT_NEAR(p.B, 2.625, 1e-3);
    EXPECT_FALSE(p.exact_counts());

    EXPECT_EQ(LzEstimateParams::make(2.0, 0.001, 50).ell0, 50u);

    const auto small = LzEstimateParams::make(1.5, 0.1, 1000);
    EXPECT_TRUE(small.exact_counts());
    EXPECT_EQ(small.effective_B(), 1.0);
}

TEST(LzParams, DomainErrors) {
    EXPECT_THROW(LzEstimateParams::make(1.0, 0.1, 100), std::invalid_argument);
    EXPECT_THROW(LzEstimateParams::make(4.0, 0.0, 100), std::invalid_argument);
    EXPECT_THROW(LzEstimateParams::make(4.0, 1.0, 100), std::invalid_argument);
    EXPECT_THROW(LzEstimateParams::make(4.0, 0.5, 100), std::invalid_argument);
}

TEST(EstimateDistinct, ConstantString) {
    auto w = QueryCountedString::from_text("aaaa");
    EXPECT_DOUBLE_EQ(estimate_distinct(w, 2, 3.0, 0.1, 1), 3.0);
    EXPECT_THROW(estimate_distinct(w, 5, 3.0, 0.1, 1), std::invalid_argument);
}

TEST(EstimateDistinct, HighDiversityWithinB) {
    const auto s = uniform_random_string(4096, 16, 8);
    const double d4 = static_cast<double>(naive::distinct_windows(s, 4));
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto w = QueryCountedString::from_symbols(s, 16);
        const double est = estimate_distinct(w, 4, 2.0, 1.0 / 30.0, seed);
        ASSERT_LE(est, 2.0 * d4);
        ok += est >= d4 / 2.0;
    }
    EXPECT_GE(ok, 27);
}

TEST(EstimateDistinct, ShorterLengthsReuseWindowPrefixes) {
    const auto s = uniform_random_string(3000, 3, 2);
    const auto samples = draw_window_samples(s.size(), 6, 2.5, 0.2, 99);
    for (const auto& run : samples.runs) {
        EXPECT_EQ(run.size(), samples.per_run);
        for (std::size_t t : run) {
            ASSERT_GE(t, 1u);
            ASSERT_LE(t, s.size() - 6 + 1);
        }
    }
    auto w = QueryCountedString::from_symbols(s, 3);
    const auto full = estimate_distinct_profile(w, 6, 2.5, samples);
    const std::uint64_t reads_full = w.queries();
    for (std::size_t l = 1; l <= 6; ++l) {
        auto fresh = w.fresh_view();
        EXPECT_EQ(estimate_distinct(fresh, l, 2.5, samples), full[l]) << l;
        EXPECT_LE(fresh.queries(), reads_full);
    }
    // Brute force over the same starts for l = 2.
    std::vector<double> per_run;
    for (const auto& run : samples.runs) {
        std::set<std::vector<Symbol>> seen;
        for (std::size_t t : run) seen.emplace(s.begin() + (t - 1), s.begin() + (t - 1) + 2);
        per_run.push_back(static_cast<double>(seen.size()) * 2.5);
    }
    EXPECT_EQ(full[2], lower_median(per_run));
}

TEST(LzEstimate, ConstantString) {
    auto w = QueryCountedString::from_symbols(constant_string(100000));
    const auto r = lz_estimate(w, 8.0, 0.05, 1);
    EXPECT_LE(r.estimate, 8.0 + 0.05 * 100000 + 1e-9);
    EXPECT_TRUE(meets_contract(r, 2.0, 100000));
    EXPECT_EQ(r.lambda, 8.0);
    EXPECT_EQ(r.epsilon, 0.05);
}

TEST(LzEstimate, DeterministicAndWithinCeiling) {
    const auto s = uniform_random_string(20000, 2, 3);
    auto a = QueryCountedString::from_symbols(s);
    auto b = QueryCountedString::from_symbols(s);
    const auto ra = lz_estimate(a, 16.0, 0.02, 5);
    const auto rb = lz_estimate(b, 16.0, 0.02, 5);
    EXPECT_EQ(ra.estimate, rb.estimate);
    EXPECT_EQ(ra.queries_used, rb.queries_used);
    EXPECT_LE(ra.queries_used, ra.query_ceiling);
    EXPECT_FALSE(ra.exhaustive);
    const auto p = LzEstimateParams::make(16.0, 0.02, s.size());
    EXPECT_EQ(ra.query_ceiling, lz_query_ceiling(s.size(), p));
}

TEST(LzEstimate, ExactCountsWhenBAtMostOne) {
    const auto s = uniform_random_string(3000, 4, 12);
    auto w = QueryCountedString::from_symbols(s, 4);
    const auto r = lz_estimate(w, 1.5, 0.1, 3);
    EXPECT_TRUE(r.exhaustive);
    const auto p = LzEstimateParams::make(1.5, 0.1, s.size());
    double m = 0;
    for (std::size_t l = 1; l <= p.ell0; ++l) {
        m = std::max(m, static_cast<double>(naive::distinct_windows(s, l)) / static_cast<double>(l));
    }
    EXPECT_DOUBLE_EQ(r.estimate, m * 1.5 + 0.1 * 3000);
}

TEST(LzEstimate, ExactProfileSandwich) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = uniform_random_string(600, 2 + seed % 3, seed);
        for (std::size_t ell0 : {2u, 5u, 16u}) {
            const auto d = exact_distinct_profile(s, ell0);
            double m = 0;
            for (std::size_t l = 1; l <= ell0; ++l) m = std::max(m, static_cast<double>(d[l]) / static_cast<double>(l));
            const double c = static_cast<double>(exact_lz_cost(s).total_cost);
            EXPECT_LE(m, c);
            EXPECT_LE(c, 4.0 * (m * std::log2(static_cast<double>(ell0)) + 600.0 / static_cast<double>(ell0)));
        }
    }
}

TEST(LzEstimate, ContractOnRandomBinary) {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = uniform_random_string(100000, 2, 300 + seed);
        auto w = QueryCountedString::from_symbols(s);
        ok += meets_contract(lz_estimate(w, 8.0, 0.05, seed), static_cast<double>(exact_lz_cost(s).total_cost),
                             s.size());
    }
    EXPECT_EQ(ok, 5);
}

TEST(Distinguish, SeparatesConstantFromRandomBytes) {
    const std::size_t n = 100000;
    const double lo = std::sqrt(static_cast<double>(n));
    const double hi = static_cast<double>(n) / 4.0;
    auto ones = QueryCountedString::from_symbols(constant_string(n));
    EXPECT_TRUE(distinguish_compressible(ones, lo, hi, 1).compressible);
    auto bytes = QueryCountedString::from_symbols(uniform_random_string(n, 256, 4), 256);
    const auto v = distinguish_compressible(bytes, lo, hi, 1);
    EXPECT_FALSE(v.compressible);
    EXPECT_NEAR(v.A, std::sqrt(hi / lo) / 2.0, 1e-12);
    EXPECT_NEAR(v.epsilon, lo * v.A / static_cast<double>(n), 1e-15);
    EXPECT_NEAR(v.threshold, std::sqrt(1.5 * lo * hi), 1e-9);
}

TEST(Distinguish, DomainErrors) {
    auto w = QueryCountedString::from_symbols(constant_string(1000));
    EXPECT_THROW(distinguish_compressible(w, 10, 30, 1), std::invalid_argument);   // ratio < 4
    EXPECT_THROW(distinguish_compressible(w, 10, 40, 1), std::invalid_argument);   // ratio = 4, A = 1
    EXPECT_THROW(distinguish_compressible(w, 50, 10, 1), std::invalid_argument);
    EXPECT_THROW(distinguish_compressible(w, 0.5, 100, 1), std::invalid_argument);
    EXPECT_THROW(distinguish_compressible(w, 10, 2000, 1), std::invalid_argument);
    EXPECT_NO_THROW(distinguish_compressible(w, 10, 1000, 1));
}
