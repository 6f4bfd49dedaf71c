#pragma once

// Query-accounting access to the input string. Estimators only ever see the input
// through QueryCountedString, so "how many positions did it look at" is a number we
// can assert on.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace sublinear {

using Symbol = std::uint32_t;

/// Lazily computes the symbol at a 1-based position. Must be deterministic.
using SymbolProvider = std::function<Symbol(std::size_t)>;

inline std::size_t count_distinct(std::span<const Symbol> symbols) {
    std::unordered_set<Symbol> seen(symbols.begin(), symbols.end());
    return seen.size();
}

inline std::vector<Symbol> to_symbols(std::string_view text) {
    std::vector<Symbol> out;
    out.reserve(text.size());
    for (unsigned char c : text) out.push_back(c);
    return out;
}

/// Read-only string of length n over an alphabet of size |Sigma| >= 2 that counts the
/// distinct positions read (cache-once: re-reading a position is free).
///
/// Positions are 1-based. Copies share the immutable backing source and carry their own
/// counter; fresh_view() gives a zeroed counter. A single view is not meant to be read
/// from several threads at once, give each run its own view instead.
class QueryCountedString {
public:
    QueryCountedString() = default;

    /// alphabet_size == 0 infers max(2, number of distinct symbols).
    static QueryCountedString from_symbols(std::vector<Symbol> symbols, std::size_t alphabet_size = 0) {
        if (symbols.empty()) throw std::invalid_argument("input string must be nonempty");
        const std::size_t distinct = count_distinct(symbols);
        if (alphabet_size == 0) {
            alphabet_size = std::max<std::size_t>(2, distinct);
        } else if (alphabet_size < 2) {
            throw std::invalid_argument("alphabet size must be at least 2");
        } else if (distinct > alphabet_size) {
            throw std::invalid_argument("string has " + std::to_string(distinct) +
                                        " distinct symbols, more than alphabet size " +
                                        std::to_string(alphabet_size));
        }
        auto source = std::make_shared<Source>();
        source->length = symbols.size();
        source->alphabet_size = alphabet_size;
        source->data = std::move(symbols);
        return QueryCountedString(std::move(source));
    }

    static QueryCountedString from_bytes(std::span<const std::uint8_t> bytes, std::size_t alphabet_size = 0) {
        return from_symbols(std::vector<Symbol>(bytes.begin(), bytes.end()), alphabet_size);
    }

    static QueryCountedString from_text(std::string_view text, std::size_t alphabet_size = 0) {
        return from_symbols(to_symbols(text), alphabet_size);
    }

    /// Whole-file load; every byte is one symbol.
    static QueryCountedString from_file(const std::filesystem::path& path, std::size_t alphabet_size = 0) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (bytes.empty()) throw std::invalid_argument(path.string() + " is empty");
        return from_bytes(bytes, alphabet_size);
    }

    static QueryCountedString from_provider(std::size_t length, std::size_t alphabet_size, SymbolProvider provider) {
        if (length == 0) throw std::invalid_argument("input string must be nonempty");
        if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be at least 2");
        if (!provider) throw std::invalid_argument("symbol provider is empty");
        auto source = std::make_shared<Source>();
        source->length = length;
        source->alphabet_size = alphabet_size;
        source->provider = std::move(provider);
        return QueryCountedString(std::move(source));
    }

    /// Returns w_position and charges one query the first time the position is read.
    Symbol read(std::size_t position) {
        if (position < 1 || position > length()) {
            throw std::out_of_range("read position " + std::to_string(position) + " outside [1, " +
                                    std::to_string(length()) + "]");
        }
        mark(position);
        return source_->at(position);
    }

    std::size_t length() const noexcept { return source_ ? source_->length : 0; }
    std::size_t alphabet_size() const noexcept { return source_ ? source_->alphabet_size : 0; }
    std::uint64_t queries() const noexcept { return queries_; }

    bool was_read(std::size_t position) const {
        if (position < 1 || position > length()) return false;
        if (dense()) return seen_dense_[position - 1];
        return seen_sparse_.contains(position);
    }

    /// Same backing string, zero queries.
    QueryCountedString fresh_view() const { return QueryCountedString(source_); }

    /// Ground-truth copy for exact oracles. Not charged to the counter; estimators must
    /// never call this.
    std::vector<Symbol> contents_uncounted() const {
        if (!source_) return {};
        if (!source_->provider) return source_->data;
        std::vector<Symbol> out(length());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = source_->provider(i + 1);
        return out;
    }

private:
    // Above this length the cache-once set switches from a bitmap to a hash set, so lazy
    // inputs of astronomical length stay cheap.
    static constexpr std::size_t kDenseLimit = std::size_t{1} << 26;

    struct Source {
        std::size_t length = 0;
        std::size_t alphabet_size = 0;
        std::vector<Symbol> data;
        SymbolProvider provider;

        Symbol at(std::size_t position) const {
            return provider ? provider(position) : data[position - 1];
        }
    };

    explicit QueryCountedString(std::shared_ptr<const Source> source) : source_(std::move(source)) {
        if (dense()) seen_dense_.assign(source_->length, false);
    }

    bool dense() const noexcept { return length() <= kDenseLimit; }

    void mark(std::size_t position) {
        if (dense()) {
            auto slot = seen_dense_[position - 1];
            if (!slot) {
                slot = true;
                ++queries_;
            }
        } else if (seen_sparse_.insert(position).second) {
            ++queries_;
        }
    }

    std::shared_ptr<const Source> source_;
    std::vector<bool> seen_dense_;
    std::unordered_set<std::size_t> seen_sparse_;
    std::uint64_t queries_ = 0;
};

/// Result of one estimator call.
///
/// The estimate claims to be a (lambda, epsilon)-estimate of the exact cost C:
/// C/lambda - epsilon*n <= estimate <= lambda*C + epsilon*n, with probability at least
/// `confidence`. queries_used is the accessor's counter delta over the call and
/// query_ceiling the documented budget the call was planned against.
struct EstimateReport {
    std::string algorithm;
    double estimate = 0.0;
    double lambda = 1.0;
    double epsilon = 0.0;
    std::uint64_t queries_used = 0;
    std::uint64_t query_ceiling = 0;
    std::uint64_t seed = 0;
    double confidence = 2.0 / 3.0;
    std::size_t n = 0;
    std::size_t rounds = 1;
    bool exhaustive = false;  // read the whole input and answered exactly
};

inline bool meets_contract(const EstimateReport& report, double exact, std::size_t n) {
    if (exact < 0) throw std::invalid_argument("exact cost must be nonnegative");
    const double slack = report.epsilon * static_cast<double>(n);
    const double lo = exact / report.lambda - slack;
    const double hi = report.lambda * exact + slack;
    // Tolerate float rounding when the estimate lands exactly on a bound.
    const double tol = 1e-9 * std::max(1.0, hi);
    return report.estimate >= lo - tol && report.estimate <= hi + tol;
}

}  // namespace sublinear
