#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nsdde/errors.hpp"

namespace nsdde {

// Variable name -> slot mapping used while parsing. Several names may share
// one slot (scalar systems alias x == x1, y == y1).
struct VarTable {
    std::vector<std::pair<std::string, int>> names;
    int slot_count = 0;

    static VarTable from_names(const std::vector<std::string>& vars) {
        VarTable t;
        t.slot_count = static_cast<int>(vars.size());
        for (int i = 0; i < t.slot_count; ++i) t.names.emplace_back(vars[i], i);
        return t;
    }

    const int* find(std::string_view name) const {
        for (const auto& [n, slot] : names) {
            if (n == name) return &slot;
        }
        return nullptr;
    }

    // First name registered for each slot; used for printing and bindings.
    std::vector<std::string> primary_names() const {
        std::vector<std::string> out(static_cast<std::size_t>(slot_count));
        std::vector<bool> seen(static_cast<std::size_t>(slot_count), false);
        for (const auto& [n, slot] : names) {
            if (!seen[static_cast<std::size_t>(slot)]) {
                out[static_cast<std::size_t>(slot)] = n;
                seen[static_cast<std::size_t>(slot)] = true;
            }
        }
        return out;
    }
};

// Immutable arithmetic expression over a fixed set of variable slots.
// Nodes live in a flat arena; evaluation is pure and reentrant, so parsed
// expressions can be shared freely across threads.
class Expr {
public:
    enum class Op : std::uint8_t {
        Const, Var,
        Neg, Sin, Cos, Exp, Ln, Abs, Sqrt,
        Add, Sub, Mul, Div, Pow,
    };

    struct Node {
        Op op;
        int a = -1;      // left child / unary child; slot index for Var
        int b = -1;      // right child
        double value = 0.0;
    };

    Expr() = default;
    Expr(std::vector<Node> nodes, int root, std::vector<std::string> slot_names)
        : nodes_(std::move(nodes)), root_(root), slot_names_(std::move(slot_names)) {}

    bool empty() const { return nodes_.empty(); }
    int slot_count() const { return static_cast<int>(slot_names_.size()); }
    const std::vector<std::string>& slot_names() const { return slot_names_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }

    // Evaluate with one value per slot. Throws DomainError on ln of a
    // nonpositive value, division by zero, or any non-finite intermediate.
    double eval(std::span<const double> slots) const {
        return eval_node(root_, slots);
    }

    double eval_at(const std::map<std::string, double>& bindings) const {
        std::vector<double> slots(slot_names_.size());
        for (std::size_t i = 0; i < slot_names_.size(); ++i) {
            auto it = bindings.find(slot_names_[i]);
            if (it == bindings.end()) {
                throw DomainError("unbound variable '" + slot_names_[i] + "'");
            }
            slots[i] = it->second;
        }
        return eval(slots);
    }

    // Fully parenthesized form that reparses to an identically evaluating
    // AST. Constants are printed with shortest round-trip precision.
    std::string str() const { return print_node(root_); }

private:
    double eval_node(int idx, std::span<const double> slots) const {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        switch (n.op) {
            case Op::Const: return n.value;
            case Op::Var: return slots[static_cast<std::size_t>(n.a)];
            case Op::Neg: return -eval_node(n.a, slots);
            case Op::Sin: return std::sin(eval_node(n.a, slots));
            case Op::Cos: return std::cos(eval_node(n.a, slots));
            case Op::Exp: return checked(std::exp(eval_node(n.a, slots)), "exp overflow");
            case Op::Ln: {
                const double v = eval_node(n.a, slots);
                if (v <= 0.0) throw DomainError("ln of nonpositive value");
                return std::log(v);
            }
            case Op::Abs: return std::abs(eval_node(n.a, slots));
            case Op::Sqrt: {
                const double v = eval_node(n.a, slots);
                if (v < 0.0) throw DomainError("sqrt of negative value");
                return std::sqrt(v);
            }
            case Op::Add: return checked(eval_node(n.a, slots) + eval_node(n.b, slots), "overflow in +");
            case Op::Sub: return checked(eval_node(n.a, slots) - eval_node(n.b, slots), "overflow in -");
            case Op::Mul: return checked(eval_node(n.a, slots) * eval_node(n.b, slots), "overflow in *");
            case Op::Div: {
                const double den = eval_node(n.b, slots);
                if (den == 0.0) throw DomainError("division by zero");
                return checked(eval_node(n.a, slots) / den, "overflow in /");
            }
            case Op::Pow: {
                const double base = eval_node(n.a, slots);
                const double expo = eval_node(n.b, slots);
                const double v = std::pow(base, expo);
                if (!std::isfinite(v)) throw DomainError("pow out of domain");
                return v;
            }
        }
        throw DomainError("corrupt expression node");
    }

    static double checked(double v, const char* what) {
        if (!std::isfinite(v)) throw DomainError(what);
        return v;
    }

    std::string print_node(int idx) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<std::string> slot_names_;
};

namespace detail {

inline const char* unary_name(Expr::Op op) {
    switch (op) {
        case Expr::Op::Sin: return "sin";
        case Expr::Op::Cos: return "cos";
        case Expr::Op::Exp: return "exp";
        case Expr::Op::Ln: return "ln";
        case Expr::Op::Abs: return "abs";
        case Expr::Op::Sqrt: return "sqrt";
        default: return nullptr;
    }
}

inline std::string format_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Recursive-descent parser. Precedence, loosest to tightest:
//   additive (+ -)  <  multiplicative (* /)  <  unary minus  <  pow (^)
// All binary operators associate to the left.
class Parser {
public:
    Parser(std::string_view text, const VarTable& vars) : text_(text), vars_(vars) {}

    Expr parse() {
        if (text_.empty()) throw ParseError("empty expression", 0);
        skip_ws();
        const int root = parse_additive();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return Expr(std::move(nodes_), root, vars_.primary_names());
    }

private:
    int parse_additive() {
        int lhs = parse_multiplicative();
        for (;;) {
            skip_ws();
            if (consume('+')) {
                lhs = make_binary(Expr::Op::Add, lhs, parse_multiplicative());
            } else if (consume('-')) {
                lhs = make_binary(Expr::Op::Sub, lhs, parse_multiplicative());
            } else {
                return lhs;
            }
        }
    }

    int parse_multiplicative() {
        int lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (consume('*')) {
                lhs = make_binary(Expr::Op::Mul, lhs, parse_unary());
            } else if (consume('/')) {
                lhs = make_binary(Expr::Op::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        skip_ws();
        if (consume('-')) {
            const int child = parse_unary();
            return make_unary(Expr::Op::Neg, child);
        }
        return parse_power();
    }

    int parse_power() {
        int lhs = parse_primary();
        for (;;) {
            skip_ws();
            if (!consume('^')) return lhs;
            // Exponents may carry their own sign: x^-2.
            lhs = make_binary(Expr::Op::Pow, lhs, parse_exponent());
        }
    }

    int parse_exponent() {
        skip_ws();
        if (consume('-')) return make_unary(Expr::Op::Neg, parse_exponent());
        return parse_primary();
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = parse_additive();
            skip_ws();
            if (!consume(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (is_digit(c) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        const std::size_t start = pos_;
        double value = 0.0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc{}) throw ParseError("malformed number", start);
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        Expr::Node n{Expr::Op::Const, -1, -1, value};
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    int parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            const Expr::Op op = function_op(name, start);
            ++pos_;
            const int arg = parse_additive();
            skip_ws();
            if (consume(',')) throw ParseError("function '" + std::string(name) + "' takes one argument", pos_ - 1);
            if (!consume(')')) throw ParseError("expected ')'", pos_);
            return make_unary(op, arg);
        }
        const int* slot = vars_.find(name);
        if (slot == nullptr) throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        Expr::Node n{Expr::Op::Var, *slot, -1, 0.0};
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    Expr::Op function_op(std::string_view name, std::size_t at) {
        if (name == "sin") return Expr::Op::Sin;
        if (name == "cos") return Expr::Op::Cos;
        if (name == "exp") return Expr::Op::Exp;
        if (name == "ln") return Expr::Op::Ln;
        if (name == "abs") return Expr::Op::Abs;
        if (name == "sqrt") return Expr::Op::Sqrt;
        throw ParseError("unknown function '" + std::string(name) + "'", at);
    }

    int make_unary(Expr::Op op, int child) {
        nodes_.push_back(Expr::Node{op, child, -1, 0.0});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int make_binary(Expr::Op op, int lhs, int rhs) {
        nodes_.push_back(Expr::Node{op, lhs, rhs, 0.0});
        return static_cast<int>(nodes_.size()) - 1;
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    std::string_view text_;
    const VarTable& vars_;
    std::vector<Expr::Node> nodes_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::string Expr::print_node(int idx) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.op) {
        case Op::Const: {
            if (n.value < 0.0 || (n.value == 0.0 && std::signbit(n.value))) {
                return "(" + detail::format_shortest(n.value) + ")";
            }
            return detail::format_shortest(n.value);
        }
        case Op::Var: return slot_names_[static_cast<std::size_t>(n.a)];
        case Op::Neg: return "(-" + print_node(n.a) + ")";
        case Op::Add: return "(" + print_node(n.a) + "+" + print_node(n.b) + ")";
        case Op::Sub: return "(" + print_node(n.a) + "-" + print_node(n.b) + ")";
        case Op::Mul: return "(" + print_node(n.a) + "*" + print_node(n.b) + ")";
        case Op::Div: return "(" + print_node(n.a) + "/" + print_node(n.b) + ")";
        case Op::Pow: return "(" + print_node(n.a) + "^" + print_node(n.b) + ")";
        default: {
            const char* f = detail::unary_name(n.op);
            return std::string(f) + "(" + print_node(n.a) + ")";
        }
    }
}

inline Expr parse_expr(std::string_view text, const VarTable& vars) {
    return detail::Parser(text, vars).parse();
}

inline Expr parse_expr(std::string_view text, const std::vector<std::string>& vars) {
    return parse_expr(text, VarTable::from_names(vars));
}

inline double eval_expr(const Expr& ast, const std::map<std::string, double>& bindings) {
    return ast.eval_at(bindings);
}

} // namespace nsdde
