#include "bcn/types.hpp"

namespace bcn {

std::string to_string(InputIdx i) { return "i" + std::to_string(i.value); }
std::string to_string(StateIdx s) { return "s" + std::to_string(s.value); }
std::string to_string(OutputIdx o) { return "o" + std::to_string(o.value); }
std::string to_string(MaybeInput i) { return i ? to_string(*i) : std::string("eps"); }
std::string to_string(MaybeOutput o) { return o ? to_string(*o) : std::string("eps"); }

namespace {
template <class Seq>
std::string join_seq(const Seq& seq) {
    if (seq.empty()) return "eps";
    std::string out;
    for (const auto& x : seq) {
        if (!out.empty()) out += ' ';
        out += to_string(x);
    }
    return out;
}
}  // namespace

std::string to_string(const InputSeq& seq) { return join_seq(seq); }
std::string to_string(const OutputSeq& seq) { return join_seq(seq); }

std::vector<bool> to_bits(Index value, unsigned width) {
    std::vector<bool> bits(width);
    for (unsigned k = 0; k < width; ++k) bits[k] = (value >> (width - 1 - k)) & 1u;
    return bits;
}

Index from_bits(const std::vector<bool>& bits) {
    Index v = 0;
    for (bool b : bits) v = (v << 1) | (b ? 1u : 0u);
    return v;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

}  // namespace bcn
