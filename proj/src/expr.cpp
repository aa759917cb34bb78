#include "hvt/expr.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace hvt {

namespace {

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;

    explicit Lexer(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& what) {
        throw Error("parse error at offset " + std::to_string(pos) + ": " + what);
    }

    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    // A word token: keyword or label.
    std::string word() {
        skip_ws();
        std::size_t start = pos;
        if (pos >= text.size()) return {};
        char c = text[pos];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return {};
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        return text.substr(start, pos - start);
    }

    void unread(const std::string& w) { pos -= w.size(); }

    double number() {
        skip_ws();
        const char* begin = text.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }
};

struct Parser {
    Lexer lex;
    const LabelResolver& resolve;

    Parser(const std::string& text, const LabelResolver& r) : lex(text), resolve(r) {}

    PropositionExpr parse() {
        PropositionExpr e = parse_or();
        if (!lex.eof()) lex.fail("trailing input");
        return e;
    }

    PropositionExpr parse_or() {
        PropositionExpr e = parse_and();
        while (true) {
            std::string w = lex.word();
            if (w == "OR") {
                e = PropositionExpr::make_or(std::move(e), parse_and());
            } else {
                if (!w.empty()) lex.unread(w);
                return e;
            }
        }
    }

    PropositionExpr parse_and() {
        PropositionExpr e = parse_unary();
        while (true) {
            std::string w = lex.word();
            if (w == "AND") {
                e = PropositionExpr::make_and(std::move(e), parse_unary());
            } else {
                if (!w.empty()) lex.unread(w);
                return e;
            }
        }
    }

    PropositionExpr parse_unary() {
        if (lex.accept('(')) {
            PropositionExpr e = parse_or();
            if (!lex.accept(')')) lex.fail("expected ')'");
            return e;
        }
        std::string w = lex.word();
        if (w.empty()) lex.fail("expected NOT, '(' or a label");
        if (w == "NOT") return PropositionExpr::make_not(parse_unary());
        if (w == "AND" || w == "OR") lex.fail("unexpected keyword " + w);
        // atom: LABEL @ NUMBER
        if (!lex.accept('@')) lex.fail("expected '@' after label '" + w + "'");
        double t = lex.number();
        ElementaryProposition atom;
        atom.label = w;
        atom.indices = resolve(w);
        atom.time = t;
        return PropositionExpr::make_atom(atom);
    }
};

void print_node(const PropositionExpr& e, std::string& out) {
    switch (e.kind) {
        case PropositionExpr::Kind::Atom: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", e.atom.time);
            out += e.atom.label + "@" + buf;
            return;
        }
        case PropositionExpr::Kind::Not: {
            out += "NOT ";
            bool parens = e.lhs->kind == PropositionExpr::Kind::And ||
                          e.lhs->kind == PropositionExpr::Kind::Or;
            if (parens) out += "(";
            print_node(*e.lhs, out);
            if (parens) out += ")";
            return;
        }
        case PropositionExpr::Kind::And: {
            auto emit = [&](const PropositionExpr& c, bool right) {
                // The parser is left-associative, so a right-nested AND (and
                // any OR under an AND) must be parenthesized to round-trip.
                bool parens = c.kind == PropositionExpr::Kind::Or ||
                              (right && c.kind == PropositionExpr::Kind::And);
                if (parens) out += "(";
                print_node(c, out);
                if (parens) out += ")";
            };
            emit(*e.lhs, false);
            out += " AND ";
            emit(*e.rhs, true);
            return;
        }
        case PropositionExpr::Kind::Or: {
            print_node(*e.lhs, out);
            out += " OR ";
            bool parens = e.rhs->kind == PropositionExpr::Kind::Or;
            if (parens) out += "(";
            print_node(*e.rhs, out);
            if (parens) out += ")";
            return;
        }
    }
}

}  // namespace

PropositionExpr parse_expr(const std::string& text, const LabelResolver& resolve) {
    Parser p(text, resolve);
    return p.parse();
}

std::string pretty_print(const PropositionExpr& expr) {
    std::string out;
    print_node(expr, out);
    return out;
}

bool expr_equal(const PropositionExpr& a, const PropositionExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case PropositionExpr::Kind::Atom:
            return a.atom.label == b.atom.label &&
                   a.atom.indices == b.atom.indices && a.atom.time == b.atom.time;
        case PropositionExpr::Kind::Not:
            return expr_equal(*a.lhs, *b.lhs);
        default:
            return expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
    }
}

}  // namespace hvt
