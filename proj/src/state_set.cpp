#include "bcn/state_set.hpp"

namespace bcn {

StateSet::StateSet(Index universe, std::initializer_list<Index> members) : StateSet(universe) {
    for (Index s : members) {
        if (s >= universe) throw UsageError("state " + std::to_string(s) + " outside the state space");
        insert(StateIdx{s});
    }
}

StateSet StateSet::full(Index universe) {
    StateSet s(universe);
    for (Index k = 0; k < universe; ++k) s.insert(StateIdx{k});
    return s;
}

StateIdx StateSet::first() const {
    for (std::size_t k = 0; k < words_.size(); ++k)
        if (words_[k]) return StateIdx{static_cast<Index>(k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k])))};
    throw UsageError("first() on an empty state set");
}

std::vector<StateIdx> StateSet::members() const {
    std::vector<StateIdx> out;
    for_each([&](StateIdx s) { out.push_back(s); });
    return out;
}

bool StateSet::is_subset_of(const StateSet& other) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
        if (words_[k] & ~other.words_[k]) return false;
    return true;
}

bool StateSet::intersects(const StateSet& other) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
        if (words_[k] & other.words_[k]) return true;
    return false;
}

StateSet& StateSet::operator|=(const StateSet& other) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
    return *this;
}

StateSet& StateSet::operator&=(const StateSet& other) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= other.words_[k];
    return *this;
}

int compare_numeric(const StateSet& a, const StateSet& b) {
    for (std::size_t k = a.words_.size(); k-- > 0;) {
        if (a.words_[k] != b.words_[k]) return a.words_[k] < b.words_[k] ? -1 : 1;
    }
    return 0;
}

bool canonical_less(const StateSet& a, const StateSet& b) {
    const auto na = a.size(), nb = b.size();
    if (na != nb) return na < nb;
    return compare_numeric(a, b) < 0;
}

std::size_t StateSet::hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ universe_;
    for (auto w : words_) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
    }
    return static_cast<std::size_t>(h ^ (h >> 33));
}

std::string StateSet::to_string() const {
    std::string out = "{";
    bool first_member = true;
    for_each([&](StateIdx s) {
        if (!first_member) out += ',';
        first_member = false;
        out += std::to_string(s.value);
    });
    return out + "}";
}

}  // namespace bcn
