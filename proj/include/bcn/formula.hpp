#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bcn/network.hpp"

namespace bcn::formula {

// Boolean expression over input nodes i<k> and state nodes s<k>.
//
//   expr    := xor ( ('|' | OR) xor )*
//   xor     := and ( ('^' | XOR) and )*
//   and     := unary ( ('&' | AND) unary )*
//   unary   := ('!' | '~' | NOT) unary | atom
//   atom    := '0' | '1' | i<k> | s<k> | '(' expr ')'
class Expr {
public:
    enum class Op { constant, variable, negate, conj, disj, exclusive };

    static std::unique_ptr<Expr> constant(bool value);
    static std::unique_ptr<Expr> variable(Node node);
    static std::unique_ptr<Expr> unary(Op op, std::unique_ptr<Expr> arg);
    static std::unique_ptr<Expr> binary(Op op, std::unique_ptr<Expr> lhs, std::unique_ptr<Expr> rhs);

    // Node values: inputs[k-1] is node i<k>, states[k-1] is node s<k>.
    bool evaluate(const std::vector<bool>& inputs, const std::vector<bool>& states) const;

    // Largest node number referenced for the given kind, 0 if none.
    unsigned max_node(NodeKind kind) const;

    Op op() const { return op_; }

private:
    Op op_ = Op::constant;
    bool value_ = false;
    Node node_{NodeKind::state, 0};
    std::unique_ptr<Expr> lhs_;
    std::unique_ptr<Expr> rhs_;
};

struct Located {
    std::unique_ptr<Expr> expr;
    // Position of each variable reference, in source order, for diagnostics.
    std::vector<std::pair<Node, std::size_t>> references;
};

// Parses one expression. `line` and `column_offset` locate `text` inside the
// enclosing source for error messages.
Located parse_expression(std::string_view text, std::size_t line, std::size_t column_offset);

}  // namespace bcn::formula
