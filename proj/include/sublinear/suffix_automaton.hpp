#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sublinear/string_access.hpp"

namespace sublinear::detail {

// Suffix automaton of a whole string. Each state also records the end index (0-based)
// of the first occurrence of its strings, which is what the greedy LZ77 parse needs to
// find the leftmost earlier source.
class SuffixAutomaton {
public:
    struct State {
        std::size_t len = 0;
        int link = -1;
        std::size_t first_end = 0;
        std::map<Symbol, int> next;
    };

    explicit SuffixAutomaton(std::span<const Symbol> text) {
        states_.reserve(2 * text.size() + 1);
        states_.emplace_back();
        for (std::size_t i = 0; i < text.size(); ++i) extend(text[i], i);
    }

    const State& state(int id) const { return states_[static_cast<std::size_t>(id)]; }
    std::size_t size() const noexcept { return states_.size(); }

    int transition(int id, Symbol c) const {
        const auto& next = states_[static_cast<std::size_t>(id)].next;
        auto it = next.find(c);
        return it == next.end() ? -1 : it->second;
    }

    /// d[l] for l in [0, max_len]: number of distinct substrings of length exactly l.
    std::vector<std::size_t> distinct_profile(std::size_t max_len) const {
        std::vector<std::ptrdiff_t> diff(max_len + 2, 0);
        for (std::size_t v = 1; v < states_.size(); ++v) {
            const std::size_t lo = states_[static_cast<std::size_t>(states_[v].link)].len + 1;
            const std::size_t hi = std::min(states_[v].len, max_len);
            if (lo > hi) continue;
            diff[lo] += 1;
            diff[hi + 1] -= 1;
        }
        std::vector<std::size_t> out(max_len + 1, 0);
        std::ptrdiff_t running = 0;
        for (std::size_t l = 1; l <= max_len; ++l) {
            running += diff[l];
            out[l] = static_cast<std::size_t>(running);
        }
        return out;
    }

private:
    void extend(Symbol c, std::size_t index) {
        const int cur = static_cast<int>(states_.size());
        states_.push_back(State{states_[static_cast<std::size_t>(last_)].len + 1, -1, index, {}});
        int p = last_;
        while (p != -1 && !states_[static_cast<std::size_t>(p)].next.contains(c)) {
            states_[static_cast<std::size_t>(p)].next.emplace(c, cur);
            p = states_[static_cast<std::size_t>(p)].link;
        }
        if (p == -1) {
            states_[static_cast<std::size_t>(cur)].link = 0;
        } else {
            const int q = states_[static_cast<std::size_t>(p)].next.at(c);
            if (states_[static_cast<std::size_t>(p)].len + 1 == states_[static_cast<std::size_t>(q)].len) {
                states_[static_cast<std::size_t>(cur)].link = q;
            } else {
                const int clone = static_cast<int>(states_.size());
                State copy = states_[static_cast<std::size_t>(q)];
                copy.len = states_[static_cast<std::size_t>(p)].len + 1;
                states_.push_back(std::move(copy));
                while (p != -1) {
                    auto& next = states_[static_cast<std::size_t>(p)].next;
                    auto it = next.find(c);
                    if (it == next.end() || it->second != q) break;
                    it->second = clone;
                    p = states_[static_cast<std::size_t>(p)].link;
                }
                states_[static_cast<std::size_t>(q)].link = clone;
                states_[static_cast<std::size_t>(cur)].link = clone;
            }
        }
        last_ = cur;
    }

    std::vector<State> states_;
    int last_ = 0;
};

}  // namespace sublinear::detail
