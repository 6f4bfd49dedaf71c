#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sublinear/string_access.hpp"

namespace sublinear {

/// Trie over inserted strings with one counter per depth: counter(l) is the number of
/// depth-l nodes, i.e. the number of distinct length-l prefixes inserted so far.
///
/// Children are kept as first-child / next-sibling links in flat arrays, so inserting
/// allocates nothing once capacity is reached and clear() keeps the memory.
class SubstringTrie {
public:
    explicit SubstringTrie(std::size_t max_depth = 0) { reset(max_depth); }

    void reset(std::size_t max_depth) {
        max_depth_ = max_depth;
        counters_.assign(max_depth + 1, 0);
        symbol_.assign(1, 0);
        first_child_.assign(1, kNone);
        next_sibling_.assign(1, kNone);
        inserted_ = 0;
    }

    void clear() { reset(max_depth_); }

    /// Inserts a string of length `length` whose i-th symbol (0-based) is next_symbol(i).
    /// Symbols are pulled lazily, one per level, so the caller can charge reads.
    template <typename NextSymbol>
    void insert(std::size_t length, NextSymbol&& next_symbol) {
        std::uint32_t node = 0;
        for (std::size_t depth = 1; depth <= length && depth <= max_depth_; ++depth) {
            node = child_or_create(node, next_symbol(depth - 1), depth);
        }
        ++inserted_;
    }

    void insert(std::span<const Symbol> s) {
        insert(s.size(), [&](std::size_t i) { return s[i]; });
    }

    std::size_t counter(std::size_t depth) const { return depth < counters_.size() ? counters_[depth] : 0; }
    std::size_t max_depth() const noexcept { return max_depth_; }
    std::size_t node_count() const noexcept { return symbol_.size(); }
    std::size_t inserted() const noexcept { return inserted_; }

private:
    static constexpr std::uint32_t kNone = 0xffffffffU;

    std::uint32_t child_or_create(std::uint32_t node, Symbol c, std::size_t depth) {
        for (std::uint32_t k = first_child_[node]; k != kNone; k = next_sibling_[k]) {
            if (symbol_[k] == c) return k;
        }
        const auto id = static_cast<std::uint32_t>(symbol_.size());
        symbol_.push_back(c);
        first_child_.push_back(kNone);
        next_sibling_.push_back(first_child_[node]);
        first_child_[node] = id;
        ++counters_[depth];
        return id;
    }

    std::size_t max_depth_ = 0;
    std::size_t inserted_ = 0;
    std::vector<std::size_t> counters_;
    std::vector<Symbol> symbol_;
    std::vector<std::uint32_t> first_child_;
    std::vector<std::uint32_t> next_sibling_;
};

}  // namespace sublinear
