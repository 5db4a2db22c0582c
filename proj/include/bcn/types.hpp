#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcn {

using Index = std::uint32_t;

// Index of a value vector. The index is the binary number formed by the node
// values, node 1 being the most significant bit.
template <class Tag>
struct Idx {
    Index value = 0;

    constexpr Idx() = default;
    constexpr explicit Idx(Index v) : value(v) {}

    friend constexpr auto operator<=>(Idx, Idx) = default;
};

struct InputTag {};
struct StateTag {};
struct OutputTag {};

using InputIdx = Idx<InputTag>;
using StateIdx = Idx<StateTag>;
using OutputIdx = Idx<OutputTag>;

// std::nullopt is the empty symbol.
using MaybeInput = std::optional<InputIdx>;
using MaybeOutput = std::optional<OutputIdx>;

using InputSeq = std::vector<InputIdx>;
using StateSeq = std::vector<StateIdx>;
using OutputSeq = std::vector<OutputIdx>;

inline InputSeq inputs(std::initializer_list<Index> xs) {
    InputSeq r;
    for (Index x : xs) r.emplace_back(x);
    return r;
}
inline StateSeq states(std::initializer_list<Index> xs) {
    StateSeq r;
    for (Index x : xs) r.emplace_back(x);
    return r;
}
inline OutputSeq outputs(std::initializer_list<Index> xs) {
    OutputSeq r;
    for (Index x : xs) r.emplace_back(x);
    return r;
}

std::string to_string(InputIdx i);
std::string to_string(StateIdx s);
std::string to_string(OutputIdx o);
std::string to_string(MaybeInput i);
std::string to_string(MaybeOutput o);
std::string to_string(const InputSeq& seq);
std::string to_string(const OutputSeq& seq);

// Bit-vector view of an index, most significant bit first.
std::vector<bool> to_bits(Index value, unsigned width);
Index from_bits(const std::vector<bool>& bits);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid network definition (sizes, ranges, caps).
class ModelError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// An operation was called outside its precondition.
class UsageError : public Error {
public:
    using Error::Error;
};

// Observed outputs cannot be produced by the model.
class InconsistentObservation : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

}  // namespace bcn

template <class Tag>
struct std::hash<bcn::Idx<Tag>> {
    std::size_t operator()(bcn::Idx<Tag> x) const noexcept { return std::hash<bcn::Index>{}(x.value); }
};
