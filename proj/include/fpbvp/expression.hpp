#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fpbvp::expr {

enum class NodeKind { Number, Time, Pi, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs };

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
    NodeKind kind;
    double number = 0.0;       // Number
    std::size_t var_index = 0; // Var: 0-based index into x
    Func fn = Func::Sin;       // Call
    std::vector<NodePtr> children;
};

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(std::size_t off, const std::string& msg);
};

/// Recursive-descent parser. Precedence: ^ (right-assoc) > unary - > * / > + -.
/// Identifiers: t, pi, x1..x<dim>; functions: sin cos exp log sqrt abs.
/// Errors carry the byte offset of the offending token.
NodePtr parse_expression(std::string_view src, std::size_t dim);

double eval(const Node& n, double t, std::span<const double> x);

/// Canonical fully-parenthesized rendering; parse(print(ast)) == ast.
std::string to_string(const Node& n);

bool equal(const Node& a, const Node& b);

NodePtr clone(const Node& n);

}  // namespace fpbvp::expr
