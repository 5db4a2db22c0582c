#include "bcn/model_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "bcn/formula.hpp"

namespace bcn {
namespace {

struct Word {
    std::string text;
    std::size_t line;
    std::size_t column;  // 1-based
};

struct Line {
    std::size_t number;
    std::string content;  // comment stripped
    std::vector<Word> words;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        std::string content(text.substr(start, end - start));
        if (!content.empty() && content.back() == '\r') content.pop_back();
        if (auto hash = content.find('#'); hash != std::string::npos) content.erase(hash);

        Line line{number, content, {}};
        std::size_t i = 0;
        while (i < content.size()) {
            while (i < content.size() && std::isspace(static_cast<unsigned char>(content[i]))) ++i;
            if (i >= content.size()) break;
            std::size_t j = i;
            while (j < content.size() && !std::isspace(static_cast<unsigned char>(content[j]))) ++j;
            line.words.push_back({content.substr(i, j - i), number, i + 1});
            i = j;
        }
        if (!line.words.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

Index parse_number(const Word& w) {
    Index value = 0;
    auto [ptr, ec] = std::from_chars(w.text.data(), w.text.data() + w.text.size(), value);
    if (ec != std::errc() || ptr != w.text.data() + w.text.size())
        throw ParseError(w.line, w.column, "invalid number '" + w.text + "'");
    return value;
}

std::string rest_of_line(const Line& line, std::size_t first_word) {
    const std::size_t from = line.words[first_word].column - 1;
    std::string rest = line.content.substr(from);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.pop_back();
    return rest;
}

[[noreturn]] void reject_edges(const Word& w) {
    throw ParseError(w.line, w.column, "edge declarations are not accepted; the edge set is derived from the tables");
}

bool is_edge_keyword(const std::string& s) { return s == "edges" || s == "E"; }

// Reads "<keyword> <count>" and returns the count.
unsigned expect_count(const std::vector<Line>& lines, std::size_t& at, const char* keyword) {
    if (at >= lines.size()) {
        const auto& last = lines.back();
        throw ParseError(last.number, last.content.size() + 1, std::string("expected '") + keyword + "'");
    }
    const Line& line = lines[at];
    if (is_edge_keyword(line.words[0].text)) reject_edges(line.words[0]);
    if (line.words[0].text != keyword)
        throw ParseError(line.number, line.words[0].column,
                         std::string("expected '") + keyword + "', found '" + line.words[0].text + "'");
    if (line.words.size() != 2)
        throw ParseError(line.number, line.words[0].column, std::string("'") + keyword + "' takes one count");
    ++at;
    return parse_number(line.words[1]);
}

void check_dimensions_at(const Line& header, unsigned ell, unsigned m, unsigned n) {
    try {
        check_dimensions(ell, m, n);
    } catch (const ModelError& e) {
        throw ParseError(header.number, 1, e.what());
    }
}

NetworkDef parse_table(const std::vector<Line>& lines) {
    std::size_t at = 1;
    std::string name;
    if (at < lines.size() && lines[at].words[0].text == "name") {
        if (lines[at].words.size() < 2) throw ParseError(lines[at].number, 1, "'name' needs a label");
        name = rest_of_line(lines[at], 1);
        ++at;
    }
    const std::size_t dims_line = at;
    const unsigned ell = expect_count(lines, at, "inputs");
    const unsigned m = expect_count(lines, at, "states");
    const unsigned n = expect_count(lines, at, "outputs");
    check_dimensions_at(lines[dims_line], ell, m, n);

    const std::size_t num_states = std::size_t{1} << m;
    const std::size_t sigma_size = (std::size_t{1} << ell) * num_states;

    // Collect the words of a section until the next keyword line.
    auto section = [&](const char* keyword, std::size_t expected, Index bound, const char* range_msg) {
        if (at >= lines.size() || lines[at].words[0].text != keyword) {
            const Line& where = at < lines.size() ? lines[at] : lines.back();
            if (at < lines.size() && is_edge_keyword(where.words[0].text)) reject_edges(where.words[0]);
            throw ParseError(where.number, 1, std::string("expected '") + keyword + "' section");
        }
        const Line& head = lines[at];
        if (head.words.size() != 1) throw ParseError(head.number, head.words[1].column, "unexpected text after keyword");
        ++at;
        std::vector<Index> values;
        values.reserve(expected);
        while (at < lines.size()) {
            const Word& first = lines[at].words[0];
            if (first.text == "sigma" || first.text == "rho") break;
            if (is_edge_keyword(first.text)) reject_edges(first);
            for (const Word& w : lines[at].words) {
                const Index v = parse_number(w);
                if (v >= bound) throw ParseError(w.line, w.column, std::string(range_msg) + " (" + w.text + ")");
                if (values.size() == expected)
                    throw ParseError(w.line, w.column,
                                     std::string(keyword) + " has more than " + std::to_string(expected) + " entries");
                values.push_back(v);
            }
            ++at;
        }
        if (values.size() != expected) {
            const std::size_t line_no = at < lines.size() ? lines[at].number : lines.back().number;
            throw ParseError(line_no, 1,
                             std::string(keyword) + " has " + std::to_string(values.size()) + " entries, expected " +
                                 std::to_string(expected));
        }
        return values;
    };

    auto sigma = section("sigma", sigma_size, static_cast<Index>(num_states), "state index out of range");
    auto rho = section("rho", num_states, Index{1} << n, "output index out of range");
    if (at < lines.size())
        throw ParseError(lines[at].number, lines[at].words[0].column, "unexpected '" + lines[at].words[0].text + "'");
    return NetworkDef(ell, m, n, std::move(sigma), std::move(rho), std::move(name));
}

struct Equation {
    std::size_t line;
    formula::Located rhs;
};

NetworkDef parse_formula(const std::vector<Line>& lines) {
    std::size_t at = 1;
    std::string name;
    std::optional<unsigned> declared_inputs;
    std::map<unsigned, Equation> state_eqs;
    std::map<unsigned, Equation> output_eqs;

    auto node_number = [](std::string_view digits) -> std::optional<unsigned> {
        if (digits.empty() || digits.size() > 3 || digits[0] == '0') return std::nullopt;
        for (char c : digits)
            if (c < '0' || c > '9') return std::nullopt;
        return static_cast<unsigned>(std::stoul(std::string(digits)));
    };

    for (; at < lines.size(); ++at) {
        const Line& line = lines[at];
        const Word& first = line.words[0];
        if (first.text == "name") {
            if (line.words.size() < 2) throw ParseError(line.number, 1, "'name' needs a label");
            name = rest_of_line(line, 1);
            continue;
        }
        if (first.text == "inputs") {
            if (line.words.size() != 2) throw ParseError(line.number, first.column, "'inputs' takes one count");
            declared_inputs = parse_number(line.words[1]);
            continue;
        }
        if (is_edge_keyword(first.text)) reject_edges(first);

        const auto eq = line.content.find('=');
        if (eq == std::string::npos) throw ParseError(line.number, first.column, "expected an equation");
        std::string lhs = line.content.substr(0, eq);
        const auto l0 = lhs.find_first_not_of(" \t");
        const auto l1 = lhs.find_last_not_of(" \t");
        lhs = l0 == std::string::npos ? std::string() : lhs.substr(l0, l1 - l0 + 1);
        const std::size_t lhs_col = first.column;

        auto rhs = formula::parse_expression(std::string_view(line.content).substr(eq + 1), line.number, eq + 1);
        if (!lhs.empty() && lhs[0] == 's' && lhs.back() == '\'') {
            auto k = node_number(std::string_view(lhs).substr(1, lhs.size() - 2));
            if (!k) throw ParseError(line.number, lhs_col, "bad state node '" + lhs + "'");
            if (state_eqs.count(*k)) throw ParseError(line.number, lhs_col, "duplicate equation for " + lhs);
            state_eqs.emplace(*k, Equation{line.number, std::move(rhs)});
        } else if (!lhs.empty() && lhs[0] == 'o') {
            auto k = node_number(std::string_view(lhs).substr(1));
            if (!k) throw ParseError(line.number, lhs_col, "bad output node '" + lhs + "'");
            if (output_eqs.count(*k)) throw ParseError(line.number, lhs_col, "duplicate equation for " + lhs);
            output_eqs.emplace(*k, Equation{line.number, std::move(rhs)});
        } else {
            throw ParseError(line.number, lhs_col, "left side must be s<k>' or o<k>, found '" + lhs + "'");
        }
    }

    const std::size_t last_line = lines.back().number;
    if (state_eqs.empty()) throw ParseError(last_line, 1, "no state equations");
    if (output_eqs.empty()) throw ParseError(last_line, 1, "no output equations");
    const unsigned m = static_cast<unsigned>(state_eqs.size());
    const unsigned n = static_cast<unsigned>(output_eqs.size());
    if (state_eqs.rbegin()->first != m)
        throw ParseError(state_eqs.rbegin()->second.line, 1, "state equations must cover s1'..s" + std::to_string(m) + "'");
    if (output_eqs.rbegin()->first != n)
        throw ParseError(output_eqs.rbegin()->second.line, 1, "output equations must cover o1..o" + std::to_string(n));

    unsigned max_input = 0;
    for (const auto& [k, eq] : state_eqs) max_input = std::max(max_input, eq.rhs.expr->max_node(NodeKind::input));
    const unsigned ell = declared_inputs.value_or(std::max(1u, max_input));

    for (const auto& [k, eq] : state_eqs)
        for (const auto& [node, col] : eq.rhs.references)
            if ((node.kind == NodeKind::input && node.number > ell) ||
                (node.kind == NodeKind::state && node.number > m))
                throw ParseError(eq.line, col, "undefined node " + to_string(node));
    for (const auto& [k, eq] : output_eqs)
        for (const auto& [node, col] : eq.rhs.references) {
            if (node.kind == NodeKind::input)
                throw ParseError(eq.line, col, "undefined node " + to_string(node) + " (outputs read state nodes only)");
            if (node.number > m) throw ParseError(eq.line, col, "undefined node " + to_string(node));
        }
    check_dimensions_at(lines.front(), ell, m, n);

    const Index num_inputs = Index{1} << ell, num_states = Index{1} << m;
    std::vector<Index> sigma(std::size_t{num_inputs} * num_states);
    std::vector<Index> rho(num_states);
    for (Index s = 0; s < num_states; ++s) {
        const auto sbits = to_bits(s, m);
        Index out = 0;
        for (const auto& [k, eq] : output_eqs)
            if (eq.rhs.expr->evaluate({}, sbits)) out |= node_mask(k, n);
        rho[s] = out;
        for (Index i = 0; i < num_inputs; ++i) {
            const auto ibits = to_bits(i, ell);
            Index next = 0;
            for (const auto& [k, eq] : state_eqs)
                if (eq.rhs.expr->evaluate(ibits, sbits)) next |= node_mask(k, m);
            sigma[std::size_t{i} * num_states + s] = next;
        }
    }
    return NetworkDef(ell, m, n, std::move(sigma), std::move(rho), std::move(name));
}

std::string minterm(Index context, unsigned ell, unsigned m) {
    std::string term;
    auto add = [&](const std::string& lit) {
        if (!term.empty()) term += " & ";
        term += lit;
    };
    for (unsigned j = 1; j <= ell; ++j)
        add(std::string((context >> m) & node_mask(j, ell) ? "" : "!") + "i" + std::to_string(j));
    for (unsigned j = 1; j <= m; ++j)
        add(std::string(context & node_mask(j, m) ? "" : "!") + "s" + std::to_string(j));
    return term;
}

std::string sum_of_products(const std::vector<Index>& ones, Index total, unsigned ell, unsigned m) {
    if (ones.empty()) return "0";
    if (ones.size() == total) return "1";
    std::string out;
    for (Index c : ones) {
        if (!out.empty()) out += " | ";
        out += "(" + minterm(c, ell, m) + ")";
    }
    return out;
}

}  // namespace

NetworkDef parse_model(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError(1, 1, "empty model");
    const Line& header = lines.front();
    if (header.words[0].text != "bcn") throw ParseError(header.number, header.words[0].column, "expected 'bcn 1' header");
    if (header.words.size() < 2 || header.words[1].text != "1")
        throw ParseError(header.number, header.words[0].column, "unsupported format version");
    if (header.words.size() == 2) return parse_table(lines);
    if (header.words.size() == 3 && header.words[2].text == "formula") return parse_formula(lines);
    throw ParseError(header.number, header.words[2].column, "unknown format variant '" + header.words[2].text + "'");
}

std::string serialize_model(const NetworkDef& net, ModelFormat format) {
    std::ostringstream out;
    const unsigned ell = net.input_nodes(), m = net.state_nodes(), n = net.output_nodes();
    if (format == ModelFormat::table) {
        out << "bcn 1\n";
        if (!net.name().empty()) out << "name " << net.name() << '\n';
        out << "inputs " << ell << "\nstates " << m << "\noutputs " << n << "\nsigma\n";
        for (Index i = 0; i < net.num_inputs(); ++i) {
            const auto row = net.sigma_row(InputIdx{i});
            for (std::size_t s = 0; s < row.size(); ++s) out << (s ? " " : "") << row[s];
            out << '\n';
        }
        out << "rho\n";
        for (Index s = 0; s < net.num_states(); ++s) out << (s ? " " : "") << net.rho_table()[s];
        out << '\n';
        return out.str();
    }

    out << "bcn 1 formula\n";
    if (!net.name().empty()) out << "name " << net.name() << '\n';
    out << "inputs " << ell << '\n';
    const Index contexts = net.num_inputs() * net.num_states();
    for (unsigned k = 1; k <= m; ++k) {
        std::vector<Index> ones;
        for (Index c = 0; c < contexts; ++c) {
            const Index i = c >> m, s = c & (net.num_states() - 1);
            if (net.step(InputIdx{i}, StateIdx{s}).value & node_mask(k, m)) ones.push_back(c);
        }
        out << 's' << k << "' = " << sum_of_products(ones, contexts, ell, m) << '\n';
    }
    for (unsigned k = 1; k <= n; ++k) {
        std::vector<Index> ones;
        for (Index s = 0; s < net.num_states(); ++s)
            if (net.observe(StateIdx{s}).value & node_mask(k, n)) ones.push_back(s);
        out << 'o' << k << " = " << sum_of_products(ones, net.num_states(), 0, m) << '\n';
    }
    return out.str();
}

NetworkDef load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

void save_model(const NetworkDef& net, const std::string& path, ModelFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file '" + path + "'");
    out << serialize_model(net, format);
}

}  // namespace bcn
