#include <filesystem>
#include <fstream>
#include <set>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "sublinear/random.hpp"
#include "sublinear/string_access.hpp"

using namespace sublinear;

TEST(QueryCountedString, ReadReturnsSymbolAndCountsOnce) {
    auto w = QueryCountedString::from_text("abc");
    EXPECT_EQ(w.queries(), 0u);
    EXPECT_EQ(w.read(2), Symbol('b'));
    EXPECT_EQ(w.queries(), 1u);
    EXPECT_EQ(w.read(2), Symbol('b'));
    EXPECT_EQ(w.queries(), 1u);
    EXPECT_TRUE(w.was_read(2));
    EXPECT_FALSE(w.was_read(1));
}

TEST(QueryCountedString, OutOfRangeReadsThrow) {
    auto w = QueryCountedString::from_text("abc");
    EXPECT_THROW(w.read(4), std::out_of_range);
    EXPECT_THROW(w.read(0), std::out_of_range);
    EXPECT_EQ(w.queries(), 0u);
}

TEST(QueryCountedString, AlphabetInferenceAndValidation) {
    EXPECT_EQ(QueryCountedString::from_text("aaaa").alphabet_size(), 2u);
    EXPECT_EQ(QueryCountedString::from_text("abcd").alphabet_size(), 4u);
    EXPECT_EQ(QueryCountedString::from_text("ab", 26).alphabet_size(), 26u);
    EXPECT_THROW(QueryCountedString::from_text("abc", 2), std::invalid_argument);
    EXPECT_THROW(QueryCountedString::from_text("ab", 1), std::invalid_argument);
    EXPECT_THROW(QueryCountedString::from_text(""), std::invalid_argument);
}

TEST(QueryCountedString, CounterEqualsDistinctPositionsTouched) {
    auto w = QueryCountedString::from_symbols(std::vector<Symbol>(1000, 1));
    Rng rng(42);
    std::set<std::size_t> touched;
    for (int i = 0; i < 5000; ++i) {
        const std::size_t p = uniform_index(rng, 1, 1000);
        w.read(p);
        touched.insert(p);
        ASSERT_LE(w.queries(), w.length());
    }
    EXPECT_EQ(w.queries(), touched.size());
}

TEST(QueryCountedString, FreshViewSharesContentsWithZeroCounter) {
    auto w = QueryCountedString::from_text("hello");
    w.read(1);
    w.read(5);
    auto v = w.fresh_view();
    EXPECT_EQ(v.queries(), 0u);
    EXPECT_EQ(v.read(5), Symbol('o'));
    EXPECT_EQ(w.queries(), 2u);
    EXPECT_EQ(v.contents_uncounted(), to_symbols("hello"));
    EXPECT_EQ(v.queries(), 1u);
}

TEST(QueryCountedString, LazyProviderIsOnlyAskedForReadPositions) {
    std::vector<std::size_t> asked;
    auto w = QueryCountedString::from_provider(1'000'000'000, 2, [&](std::size_t p) {
        asked.push_back(p);
        return static_cast<Symbol>(p % 2);
    });
    EXPECT_EQ(w.length(), 1'000'000'000u);
    EXPECT_EQ(w.read(7), 1u);
    EXPECT_EQ(w.read(999'999'999), 1u);
    EXPECT_EQ(w.read(7), 1u);
    EXPECT_EQ(w.queries(), 2u);
    EXPECT_LE(asked.size(), 3u);
    EXPECT_THROW(QueryCountedString::from_provider(0, 2, [](std::size_t) { return Symbol{0}; }),
                 std::invalid_argument);
}

TEST(QueryCountedString, FromFileLoadsRawBytes) {
    const auto path = std::filesystem::temp_directory_path() / "sublinear_string_access_test.bin";
    {
        std::ofstream out(path, std::ios::binary);
        const char bytes[] = {0, 1, 1, static_cast<char>(255)};
        out.write(bytes, sizeof bytes);
    }
    auto w = QueryCountedString::from_file(path);
    EXPECT_EQ(w.length(), 4u);
    EXPECT_EQ(w.alphabet_size(), 3u);
    EXPECT_EQ(w.read(4), 255u);
    std::filesystem::remove(path);
    EXPECT_THROW(QueryCountedString::from_file(path), std::runtime_error);
}

TEST(QueryCountedString, IndependentViewsAcrossThreads) {
    const auto base = QueryCountedString::from_symbols(std::vector<Symbol>(10000, 0));
    std::vector<std::uint64_t> counts(4);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < counts.size(); ++t) {
        pool.emplace_back([&, t] {
            auto w = base.fresh_view();
            for (std::size_t p = 1; p <= 1000 * (t + 1); ++p) w.read(p);
            counts[t] = w.queries();
        });
    }
    for (auto& th : pool) th.join();
    for (std::size_t t = 0; t < counts.size(); ++t) EXPECT_EQ(counts[t], 1000 * (t + 1));
}

TEST(MeetsContract, Examples) {
    EstimateReport r;
    r.estimate = 5;
    EXPECT_TRUE(meets_contract(r, 5, 10));

    r.estimate = 0;
    r.epsilon = 0.5;
    EXPECT_TRUE(meets_contract(r, 4, 10));

    r.estimate = 100;
    r.lambda = 2;
    r.epsilon = 0;
    EXPECT_FALSE(meets_contract(r, 10, 10));
    r.estimate = 20;
    EXPECT_TRUE(meets_contract(r, 10, 10));
    r.estimate = 4.99;
    EXPECT_FALSE(meets_contract(r, 10, 10));
}

TEST(DeriveSeed, StableAndDistinct) {
    EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
    EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
    EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(7, i));
    EXPECT_EQ(seeds.size(), 1000u);
}
