#include "bcn/formula.hpp"

#include <cctype>

namespace bcn::formula {

std::unique_ptr<Expr> Expr::constant(bool value) {
    auto e = std::make_unique<Expr>();
    e->op_ = Op::constant;
    e->value_ = value;
    return e;
}

std::unique_ptr<Expr> Expr::variable(Node node) {
    auto e = std::make_unique<Expr>();
    e->op_ = Op::variable;
    e->node_ = node;
    return e;
}

std::unique_ptr<Expr> Expr::unary(Op op, std::unique_ptr<Expr> arg) {
    auto e = std::make_unique<Expr>();
    e->op_ = op;
    e->lhs_ = std::move(arg);
    return e;
}

std::unique_ptr<Expr> Expr::binary(Op op, std::unique_ptr<Expr> lhs, std::unique_ptr<Expr> rhs) {
    auto e = std::make_unique<Expr>();
    e->op_ = op;
    e->lhs_ = std::move(lhs);
    e->rhs_ = std::move(rhs);
    return e;
}

bool Expr::evaluate(const std::vector<bool>& inputs, const std::vector<bool>& states) const {
    switch (op_) {
        case Op::constant:
            return value_;
        case Op::variable:
            return node_.kind == NodeKind::input ? inputs[node_.number - 1] : states[node_.number - 1];
        case Op::negate:
            return !lhs_->evaluate(inputs, states);
        case Op::conj:
            return lhs_->evaluate(inputs, states) && rhs_->evaluate(inputs, states);
        case Op::disj:
            return lhs_->evaluate(inputs, states) || rhs_->evaluate(inputs, states);
        case Op::exclusive:
            return lhs_->evaluate(inputs, states) != rhs_->evaluate(inputs, states);
    }
    return false;
}

unsigned Expr::max_node(NodeKind kind) const {
    unsigned best = 0;
    if (op_ == Op::variable && node_.kind == kind) best = node_.number;
    if (lhs_) best = std::max(best, lhs_->max_node(kind));
    if (rhs_) best = std::max(best, rhs_->max_node(kind));
    return best;
}

namespace {

enum class Tok { zero, one, ident, lparen, rparen, op_not, op_and, op_or, op_xor, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t column;
};

class Parser {
public:
    Parser(std::string_view text, std::size_t line, std::size_t offset) : text_(text), line_(line), offset_(offset) {
        advance();
    }

    Located parse() {
        Located out;
        refs_ = &out.references;
        out.expr = parse_or();
        if (tok_.kind != Tok::end) fail(tok_.column, "unexpected '" + tok_.text + "'");
        return out;
    }

private:
    [[noreturn]] void fail(std::size_t column, const std::string& what) const {
        throw ParseError(line_, offset_ + column + 1, what);
    }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= text_.size()) {
            tok_ = {Tok::end, "end of expression", start};
            return;
        }
        const char c = text_[pos_];
        auto single = [&](Tok k) {
            ++pos_;
            tok_ = {k, std::string(1, c), start};
        };
        switch (c) {
            case '(': return single(Tok::lparen);
            case ')': return single(Tok::rparen);
            case '!':
            case '~': return single(Tok::op_not);
            case '&': return single(Tok::op_and);
            case '|': return single(Tok::op_or);
            case '^': return single(Tok::op_xor);
            default: break;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string word(text_.substr(start, pos_ - start));
            Tok k = Tok::ident;
            if (word == "0") k = Tok::zero;
            else if (word == "1") k = Tok::one;
            else if (word == "NOT") k = Tok::op_not;
            else if (word == "AND") k = Tok::op_and;
            else if (word == "OR") k = Tok::op_or;
            else if (word == "XOR") k = Tok::op_xor;
            tok_ = {k, std::move(word), start};
            return;
        }
        fail(start, std::string("unexpected character '") + c + "'");
    }

    std::unique_ptr<Expr> parse_or() {
        auto lhs = parse_xor();
        while (tok_.kind == Tok::op_or) {
            advance();
            lhs = Expr::binary(Expr::Op::disj, std::move(lhs), parse_xor());
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_xor() {
        auto lhs = parse_and();
        while (tok_.kind == Tok::op_xor) {
            advance();
            lhs = Expr::binary(Expr::Op::exclusive, std::move(lhs), parse_and());
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_and() {
        auto lhs = parse_unary();
        while (tok_.kind == Tok::op_and) {
            advance();
            lhs = Expr::binary(Expr::Op::conj, std::move(lhs), parse_unary());
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_unary() {
        if (tok_.kind == Tok::op_not) {
            advance();
            return Expr::unary(Expr::Op::negate, parse_unary());
        }
        return parse_atom();
    }

    std::unique_ptr<Expr> parse_atom() {
        const Token t = tok_;
        switch (t.kind) {
            case Tok::zero:
                advance();
                return Expr::constant(false);
            case Tok::one:
                advance();
                return Expr::constant(true);
            case Tok::lparen: {
                advance();
                auto e = parse_or();
                if (tok_.kind != Tok::rparen) fail(tok_.column, "expected ')'");
                advance();
                return e;
            }
            case Tok::ident: {
                advance();
                const char kind = t.text[0];
                const std::string digits = t.text.substr(1);
                const bool numeric = !digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos &&
                                     digits[0] != '0';
                if ((kind != 'i' && kind != 's') || !numeric || digits.size() > 3)
                    fail(t.column, "undefined node '" + t.text + "'");
                Node node{kind == 'i' ? NodeKind::input : NodeKind::state,
                          static_cast<unsigned>(std::stoul(digits))};
                refs_->emplace_back(node, offset_ + t.column + 1);
                return Expr::variable(node);
            }
            default:
                fail(t.column, "expected an operand, found '" + t.text + "'");
        }
    }

    std::string_view text_;
    std::size_t line_;
    std::size_t offset_;
    std::size_t pos_ = 0;
    Token tok_{Tok::end, "", 0};
    std::vector<std::pair<Node, std::size_t>>* refs_ = nullptr;
};

}  // namespace

Located parse_expression(std::string_view text, std::size_t line, std::size_t column_offset) {
    return Parser(text, line, column_offset).parse();
}

}  // namespace bcn::formula
