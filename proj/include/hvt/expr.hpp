#ifndef HVT_EXPR_HPP
#define HVT_EXPR_HPP

#include <functional>
#include <string>

#include "hvt/propositions.hpp"

namespace hvt {

/// Resolves an atom label to its index set; throws on unknown labels.
using LabelResolver = std::function<std::vector<int>(const std::string&)>;

/// Recursive-descent parser for the proposition grammar
///   expr  := or
///   or    := and ("OR" and)*
///   and   := unary ("AND" unary)*
///   unary := "NOT" unary | "(" expr ")" | atom
///   atom  := LABEL "@" NUMBER
/// NOT binds tightest, then AND, then OR; AND/OR are left-associative.
/// LABEL matches [A-Za-z_][A-Za-z0-9_]*; NUMBER is a decimal literal.
PropositionExpr parse_expr(const std::string& text,
                           const LabelResolver& resolve);

/// Inverse of parse_expr up to whitespace: parse(pretty_print(e)) == e.
std::string pretty_print(const PropositionExpr& expr);

bool expr_equal(const PropositionExpr& a, const PropositionExpr& b);

}  // namespace hvt

#endif
