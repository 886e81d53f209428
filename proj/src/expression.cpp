#include "fpbvp/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace fpbvp::expr {

ParseError::ParseError(std::size_t off, const std::string& msg)
    : std::runtime_error(msg + " (offset " + std::to_string(off) + ")"), offset(off) {}

namespace {

NodePtr make(NodeKind k) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    return n;
}

struct Parser {
    std::string_view src;
    std::size_t pos = 0;
    std::size_t dim;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= src.size();
    }
    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr parse() {
        skip_ws();
        if (pos >= src.size()) throw ParseError(pos, "empty expression");
        NodePtr e = expression();
        skip_ws();
        if (pos < src.size()) throw ParseError(pos, "unexpected trailing input");
        return e;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        while (true) {
            const char c = peek();
            if (c != '+' && c != '-') break;
            ++pos;
            NodePtr n = make(c == '+' ? NodeKind::Add : NodeKind::Sub);
            n->children.push_back(std::move(lhs));
            n->children.push_back(term());
            lhs = std::move(n);
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (true) {
            const char c = peek();
            if (c != '*' && c != '/') break;
            ++pos;
            NodePtr n = make(c == '*' ? NodeKind::Mul : NodeKind::Div);
            n->children.push_back(std::move(lhs));
            n->children.push_back(unary());
            lhs = std::move(n);
        }
        return lhs;
    }

    NodePtr unary() {
        if (peek() == '-') {
            ++pos;
            NodePtr n = make(NodeKind::Neg);
            n->children.push_back(unary());
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (peek() == '^') {
            ++pos;
            NodePtr n = make(NodeKind::Pow);
            n->children.push_back(std::move(base));
            n->children.push_back(unary());  // right-associative, allows 2^-3
            return n;
        }
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos >= src.size()) throw ParseError(pos, "unexpected end of expression");
        const char c = src[pos];
        if (c == '(') {
            ++pos;
            NodePtr e = expression();
            if (!consume(')')) throw ParseError(pos, "expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError(pos, std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const std::size_t start = pos;
        const char* begin = src.data() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError(start, "malformed number");
        pos += static_cast<std::size_t>(end - begin);
        NodePtr n = make(NodeKind::Number);
        n->number = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        const std::string_view name = src.substr(start, pos - start);
        if (name == "t") return make(NodeKind::Time);
        if (name == "pi") return make(NodeKind::Pi);
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                const long idx = std::strtol(name.data() + 1, nullptr, 10);
                if (idx < 1 || static_cast<std::size_t>(idx) > dim)
                    throw ParseError(start, "variable index out of range: " + std::string(name));
                NodePtr n = make(NodeKind::Var);
                n->var_index = static_cast<std::size_t>(idx - 1);
                return n;
            }
        }
        Func fn;
        if (name == "sin") fn = Func::Sin;
        else if (name == "cos") fn = Func::Cos;
        else if (name == "exp") fn = Func::Exp;
        else if (name == "log") fn = Func::Log;
        else if (name == "sqrt") fn = Func::Sqrt;
        else if (name == "abs") fn = Func::Abs;
        else throw ParseError(start, "unknown identifier: " + std::string(name));
        if (!consume('(')) throw ParseError(pos, "expected '(' after function name");
        NodePtr arg = expression();
        if (!consume(')')) throw ParseError(pos, "expected ')' closing function call");
        NodePtr n = make(NodeKind::Call);
        n->fn = fn;
        n->children.push_back(std::move(arg));
        return n;
    }
};

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
    }
    return "?";
}

}  // namespace

NodePtr parse_expression(std::string_view src, std::size_t dim) {
    Parser p{src, 0, dim};
    return p.parse();
}

double eval(const Node& n, double t, std::span<const double> x) {
    switch (n.kind) {
        case NodeKind::Number: return n.number;
        case NodeKind::Time: return t;
        case NodeKind::Pi: return M_PI;
        case NodeKind::Var: return x[n.var_index];
        case NodeKind::Neg: return -eval(*n.children[0], t, x);
        case NodeKind::Add: return eval(*n.children[0], t, x) + eval(*n.children[1], t, x);
        case NodeKind::Sub: return eval(*n.children[0], t, x) - eval(*n.children[1], t, x);
        case NodeKind::Mul: return eval(*n.children[0], t, x) * eval(*n.children[1], t, x);
        case NodeKind::Div: return eval(*n.children[0], t, x) / eval(*n.children[1], t, x);
        case NodeKind::Pow:
            return std::pow(eval(*n.children[0], t, x), eval(*n.children[1], t, x));
        case NodeKind::Call: {
            const double a = eval(*n.children[0], t, x);
            switch (n.fn) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return std::exp(a);
                case Func::Log:
                    if (!(a > 0.0)) throw std::domain_error("log of non-positive value");
                    return std::log(a);
                case Func::Sqrt:
                    if (a < 0.0) throw std::domain_error("sqrt of negative value");
                    return std::sqrt(a);
                case Func::Abs: return std::abs(a);
            }
            break;
        }
    }
    throw std::logic_error("expr::eval: bad node");
}

std::string to_string(const Node& n) {
    std::ostringstream os;
    os.precision(17);
    switch (n.kind) {
        case NodeKind::Number: os << n.number; break;
        case NodeKind::Time: os << "t"; break;
        case NodeKind::Pi: os << "pi"; break;
        case NodeKind::Var: os << "x" << n.var_index + 1; break;
        case NodeKind::Neg: os << "(-" << to_string(*n.children[0]) << ")"; break;
        case NodeKind::Add:
            os << "(" << to_string(*n.children[0]) << "+" << to_string(*n.children[1]) << ")";
            break;
        case NodeKind::Sub:
            os << "(" << to_string(*n.children[0]) << "-" << to_string(*n.children[1]) << ")";
            break;
        case NodeKind::Mul:
            os << "(" << to_string(*n.children[0]) << "*" << to_string(*n.children[1]) << ")";
            break;
        case NodeKind::Div:
            os << "(" << to_string(*n.children[0]) << "/" << to_string(*n.children[1]) << ")";
            break;
        case NodeKind::Pow:
            os << "(" << to_string(*n.children[0]) << "^" << to_string(*n.children[1]) << ")";
            break;
        case NodeKind::Call:
            os << func_name(n.fn) << "(" << to_string(*n.children[0]) << ")";
            break;
    }
    return os.str();
}

bool equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Number: return a.number == b.number;
        case NodeKind::Var: return a.var_index == b.var_index;
        case NodeKind::Call:
            if (a.fn != b.fn) return false;
            break;
        default: break;
    }
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!equal(*a.children[i], *b.children[i])) return false;
    return true;
}

NodePtr clone(const Node& n) {
    auto c = std::make_unique<Node>();
    c->kind = n.kind;
    c->number = n.number;
    c->var_index = n.var_index;
    c->fn = n.fn;
    for (const auto& ch : n.children) c->children.push_back(clone(*ch));
    return c;
}

}  // namespace fpbvp::expr
