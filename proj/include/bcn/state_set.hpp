#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "bcn/types.hpp"

namespace bcn {

// A subset of the 2^m states, stored as a bitmask.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(Index universe) : universe_(universe), words_((universe + 63) / 64, 0) {}
    StateSet(Index universe, std::initializer_list<Index> members);

    static StateSet full(Index universe);

    Index universe() const { return universe_; }

    bool contains(StateIdx s) const { return (words_[s.value >> 6] >> (s.value & 63)) & 1u; }
    void insert(StateIdx s) { words_[s.value >> 6] |= std::uint64_t{1} << (s.value & 63); }
    void erase(StateIdx s) { words_[s.value >> 6] &= ~(std::uint64_t{1} << (s.value & 63)); }

    std::size_t size() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    // Smallest member. The set must be nonempty.
    StateIdx first() const;

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                const int bit = std::countr_zero(w);
                f(StateIdx{static_cast<Index>(k * 64 + static_cast<std::size_t>(bit))});
                w &= w - 1;
            }
        }
    }

    std::vector<StateIdx> members() const;

    bool is_subset_of(const StateSet& other) const;
    bool intersects(const StateSet& other) const;

    StateSet& operator|=(const StateSet& other);
    StateSet& operator&=(const StateSet& other);

    friend bool operator==(const StateSet& a, const StateSet& b) = default;

    // Order by cardinality, then by the numeric value of the bitmask.
    friend bool canonical_less(const StateSet& a, const StateSet& b);
    // Numeric comparison of the bitmasks.
    friend int compare_numeric(const StateSet& a, const StateSet& b);

    std::size_t hash() const;

    // "{1,2,3}"
    std::string to_string() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    Index universe_ = 0;
    std::vector<std::uint64_t> words_;
};

bool canonical_less(const StateSet& a, const StateSet& b);
int compare_numeric(const StateSet& a, const StateSet& b);

struct StateSetHash {
    std::size_t operator()(const StateSet& s) const noexcept { return s.hash(); }
};

struct CanonicalOrder {
    bool operator()(const StateSet& a, const StateSet& b) const { return canonical_less(a, b); }
};

}  // namespace bcn
