#pragma once

// Instance families used to stress the estimators: the multiplicative and additive RLE
// lower-bound families, the strings showing the LZ upper bound is tight, and the lazy
// Colors-to-LZ reduction. Plus a few plain synthetic strings used throughout the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "sublinear/exact_oracles.hpp"
#include "sublinear/random.hpp"
#include "sublinear/string_access.hpp"

namespace sublinear {

// ---------------------------------------------------------------------------
// Synthetic strings

inline std::vector<Symbol> uniform_random_string(std::size_t n, std::size_t alphabet_size, std::uint64_t seed) {
    if (alphabet_size < 1) throw std::invalid_argument("alphabet size must be >= 1");
    Rng rng(seed);
    std::vector<Symbol> w(n);
    for (auto& c : w) c = static_cast<Symbol>(uniform_index(rng, 0, alphabet_size - 1));
    return w;
}

/// 0101...
inline std::vector<Symbol> alternating_string(std::size_t n) {
    std::vector<Symbol> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<Symbol>(i % 2);
    return w;
}

inline std::vector<Symbol> constant_string(std::size_t n, Symbol symbol = 1) { return std::vector<Symbol>(n, symbol); }

/// Binary string from a run-length sequence, first run uses `first` and runs alternate.
inline std::vector<Symbol> string_from_runs(std::span<const std::size_t> runs, Symbol first = 0) {
    std::vector<Symbol> w;
    Symbol bit = first;
    for (std::size_t len : runs) {
        w.insert(w.end(), len, bit);
        bit ^= 1U;
    }
    return w;
}

/// Binary string whose runs are independently of length 1 or `long_run` with equal
/// probability, cut to length n.
inline std::vector<Symbol> planted_run_mix(std::size_t n, std::size_t long_run, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> runs;
    std::size_t total = 0;
    while (total < n) {
        const std::size_t len = uniform_index(rng, 0, 1) == 0 ? 1 : long_run;
        runs.push_back(len);
        total += len;
    }
    auto w = string_from_runs(runs);
    w.resize(n);
    return w;
}

// ---------------------------------------------------------------------------
// W_k: k blocks, odd blocks all ones, even blocks all ones but for one zero.

/// zero_offsets[i] is the 0-based offset of the zero inside the i-th even block.
inline std::vector<Symbol> wk_with_offsets(std::size_t n, std::size_t k, std::span<const std::size_t> zero_offsets) {
    if (k < 2 || k > n / 2) throw std::invalid_argument("W_k needs 2 <= k <= n/2");
    if (zero_offsets.size() != k / 2) throw std::invalid_argument("W_k needs one zero per even block");
    const std::size_t block = n / k;
    std::vector<Symbol> w(n, 1);
    for (std::size_t i = 0; i < k / 2; ++i) {
        const std::size_t b = 2 * i + 1;  // 0-based index of the (2i+2)-th block
        const std::size_t begin = b * block;
        const std::size_t end = b + 1 == k ? n : begin + block;
        if (zero_offsets[i] >= end - begin) throw std::invalid_argument("zero offset outside its block");
        w[begin + zero_offsets[i]] = 0;
    }
    return w;
}

/// Blocks have length floor(n/k); the last block absorbs the remainder.
inline std::vector<Symbol> generate_wk(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n / 2) throw std::invalid_argument("W_k needs 2 <= k <= n/2");
    Rng rng(seed);
    const std::size_t block = n / k;
    std::vector<std::size_t> offsets;
    for (std::size_t i = 0; i < k / 2; ++i) {
        const std::size_t b = 2 * i + 1;
        const std::size_t len = b + 1 == k ? n - b * block : block;
        offsets.push_back(uniform_index(rng, 0, len - 1));
    }
    return wk_with_offsets(n, k, offsets);
}

// ---------------------------------------------------------------------------
// D_{n,p}: floor(n/3) coins, heads -> three unit runs, tails -> one run of length 3.

struct CoinRunsInstance {
    std::vector<Symbol> symbols;
    std::size_t prefix = 0;  // n mod 3 leading zeros
    std::size_t heads = 0;
    std::size_t tails = 0;
};

inline CoinRunsInstance coin_runs_from_flips(std::size_t n, const std::vector<bool>& heads) {
    if (heads.size() != n / 3) throw std::invalid_argument("need floor(n/3) coin flips");
    CoinRunsInstance out;
    out.prefix = n % 3;
    std::vector<std::size_t> runs;
    for (bool h : heads) {
        if (h) {
            runs.insert(runs.end(), {1, 1, 1});
            ++out.heads;
        } else {
            runs.push_back(3);
            ++out.tails;
        }
    }
    out.symbols.assign(out.prefix, 0);
    // With a zero prefix the coin part starts with 1 so the prefix stays its own run.
    const auto body = string_from_runs(runs, out.prefix > 0 ? 1 : 0);
    out.symbols.insert(out.symbols.end(), body.begin(), body.end());
    return out;
}

inline CoinRunsInstance generate_coin_runs(std::size_t n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("coin bias must lie in [0, 1]");
    Rng rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<bool> flips(n / 3);
    for (std::size_t i = 0; i < flips.size(); ++i) flips[i] = coin(rng);
    return coin_runs_from_flips(n, flips);
}

// ---------------------------------------------------------------------------
// Strings with few distinct short substrings that still compress poorly.

/// Phase 1 lists 1..m; phase l > 1 lists 1..m doubling every symbol divisible by l-1.
/// Symbols are the integers 1..m.
inline std::vector<Symbol> generate_lz_tight(std::size_t m, std::size_t ell0) {
    if (ell0 < 1 || ell0 > m) throw std::invalid_argument("LzTight needs 1 <= ell0 <= m");
    std::vector<Symbol> w;
    for (std::size_t c = 1; c <= m; ++c) w.push_back(static_cast<Symbol>(c));
    for (std::size_t phase = 2; phase <= ell0; ++phase) {
        for (std::size_t c = 1; c <= m; ++c) {
            w.push_back(static_cast<Symbol>(c));
            if (c % (phase - 1) == 0) w.push_back(static_cast<Symbol>(c));
        }
    }
    return w;
}

/// Replaces each symbol in [1, m] by the ceil(log2 m) bits of symbol - 1, MSB first.
inline std::vector<Symbol> binarize(std::span<const Symbol> w, std::size_t m) {
    const std::size_t width = std::max<std::uint64_t>(1, ceil_log2(m));
    std::vector<Symbol> out;
    out.reserve(w.size() * width);
    for (Symbol c : w) {
        if (c < 1 || c > m) throw std::invalid_argument("binarize: symbol outside [1, m]");
        const std::uint64_t v = c - 1;
        for (std::size_t b = width; b-- > 0;) out.push_back(static_cast<Symbol>((v >> b) & 1U));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Colors -> LZ reduction.

/// Lazy string w of length n' * k over an alphabet of size sigma: block i is a uniformly
/// random length-k string chosen per color of tau_i, so equal colors give identical blocks.
/// A read of w materializes at most one block and reads tau at most once per block.
class ColorsToLzInstance {
public:
    ColorsToLzInstance(QueryCountedString tau, double alpha_prime, std::size_t alphabet_size, std::uint64_t seed) {
        const double n_prime = static_cast<double>(tau.length());
        if (!(alpha_prime > 1.0 / n_prime && alpha_prime < 1.0)) {
            throw std::invalid_argument("alpha' must lie in (1/n', 1)");
        }
        if (alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
        state_ = std::make_shared<State>();
        state_->tau = std::move(tau);
        state_->block = static_cast<std::size_t>(std::ceil(1.0 / alpha_prime - 1e-9));
        state_->alphabet_size = alphabet_size;
        state_->seed = seed;
        state_->blocks.resize(state_->tau.length());
        auto state = state_;
        w_ = QueryCountedString::from_provider(state_->tau.length() * state_->block, alphabet_size,
                                               [state](std::size_t position) { return state->symbol_at(position); });
    }

    /// The reduction string. Copies share the memoized blocks.
    QueryCountedString& w() noexcept { return w_; }
    std::size_t block_length() const noexcept { return state_->block; }
    std::size_t length() const noexcept { return w_.length(); }

    std::uint64_t tau_queries() const {
        std::lock_guard lock(state_->mutex);
        return state_->tau.queries();
    }
    std::uint64_t tau_reads() const {
        std::lock_guard lock(state_->mutex);
        return state_->tau_reads;
    }
    std::size_t blocks_materialized() const {
        std::lock_guard lock(state_->mutex);
        return state_->materialized;
    }

    /// Whole string; materializes every block.
    std::vector<Symbol> materialize() {
        std::vector<Symbol> out(length());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = state_->symbol_at(i + 1);
        return out;
    }

private:
    struct State {
        QueryCountedString tau;
        std::size_t block = 0;
        std::size_t alphabet_size = 0;
        std::uint64_t seed = 0;
        std::vector<const std::vector<Symbol>*> blocks;
        std::unordered_map<Symbol, std::vector<Symbol>> by_color;
        std::uint64_t tau_reads = 0;
        std::size_t materialized = 0;
        mutable std::mutex mutex;

        Symbol symbol_at(std::size_t position) {
            const std::size_t index = (position - 1) / block;
            std::lock_guard lock(mutex);
            const std::vector<Symbol>*& slot = blocks[index];
            if (!slot) {
                const Symbol color = tau.read(index + 1);
                ++tau_reads;
                ++materialized;
                auto [it, fresh] = by_color.try_emplace(color);
                if (fresh) {
                    // Contents depend only on (seed, color), not on query order.
                    Rng rng(derive_seed(seed, color));
                    it->second.resize(block);
                    for (auto& c : it->second) c = static_cast<Symbol>(uniform_index(rng, 0, alphabet_size - 1));
                }
                slot = &it->second;
            }
            return (*slot)[(position - 1) % block];
        }
    };

    std::shared_ptr<State> state_;
    QueryCountedString w_;
};

inline ColorsToLzInstance generate_colors_to_lz(QueryCountedString tau, double alpha_prime, std::size_t alphabet_size,
                                                std::uint64_t seed) {
    return ColorsToLzInstance(std::move(tau), alpha_prime, alphabet_size, seed);
}

// ---------------------------------------------------------------------------
// Declarative generation

/// Declarative description of one generated string.
///
/// family: wk (n, k), coin (n, p), lztight (m, ell0, binary), col2lz (tau_length,
/// colors, alpha_prime, alphabet_size), random (n, alphabet_size), alternating (n),
/// constant (n), runmix (n, long_run).
struct GeneratorSpec {
    std::string family;
    std::size_t n = 0;
    std::size_t k = 0;
    double p = 0.5;
    std::size_t m = 0;
    std::size_t ell0 = 0;
    bool binary = false;
    std::size_t tau_length = 0;
    std::size_t colors = 0;
    double alpha_prime = 0.0;
    std::size_t alphabet_size = 2;
    std::size_t long_run = 8;
    std::uint64_t seed = 0;
};

struct GeneratedString {
    std::vector<Symbol> symbols;
    std::size_t alphabet_size = 2;
};

/// tau of length n' where each of `colors` colors (0..colors-1) appears n'/colors times
/// (the first n' mod colors colors once more), in seeded random order.
inline std::vector<Symbol> multiplicity_colors(std::size_t length, std::size_t colors, std::uint64_t seed) {
    if (colors < 1 || colors > length) throw std::invalid_argument("need 1 <= colors <= length");
    std::vector<Symbol> tau(length);
    for (std::size_t i = 0; i < length; ++i) tau[i] = static_cast<Symbol>(i % colors);
    Rng rng(seed);
    std::shuffle(tau.begin(), tau.end(), rng);
    return tau;
}

inline GeneratedString generate(const GeneratorSpec& spec) {
    GeneratedString out;
    const auto& f = spec.family;
    if (f == "wk") {
        out.symbols = generate_wk(spec.n, spec.k, spec.seed);
    } else if (f == "coin") {
        out.symbols = generate_coin_runs(spec.n, spec.p, spec.seed).symbols;
    } else if (f == "lztight") {
        out.symbols = generate_lz_tight(spec.m, spec.ell0);
        out.alphabet_size = std::max<std::size_t>(2, spec.m);
        if (spec.binary) {
            out.symbols = binarize(out.symbols, spec.m);
            out.alphabet_size = 2;
        }
    } else if (f == "col2lz") {
        auto tau = multiplicity_colors(spec.tau_length, spec.colors, derive_seed(spec.seed, 0));
        auto source = QueryCountedString::from_symbols(std::move(tau), std::max<std::size_t>(2, spec.colors));
        ColorsToLzInstance instance(std::move(source), spec.alpha_prime, spec.alphabet_size, derive_seed(spec.seed, 1));
        out.symbols = instance.materialize();
        out.alphabet_size = spec.alphabet_size;
    } else if (f == "random") {
        if (spec.alphabet_size < 2) throw std::invalid_argument("alphabet size must be >= 2");
        out.symbols = uniform_random_string(spec.n, spec.alphabet_size, spec.seed);
        out.alphabet_size = spec.alphabet_size;
    } else if (f == "alternating") {
        out.symbols = alternating_string(spec.n);
    } else if (f == "constant") {
        out.symbols = constant_string(spec.n);
    } else if (f == "runmix") {
        if (spec.long_run < 1) throw std::invalid_argument("long run length must be >= 1");
        out.symbols = planted_run_mix(spec.n, spec.long_run, spec.seed);
    } else {
        throw std::invalid_argument("unknown generator family: " + f);
    }
    if (out.symbols.empty()) throw std::invalid_argument("generated string is empty");
    return out;
}

}  // namespace sublinear
