#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace perifix {

using Bindings = std::map<std::string, double, std::less<>>;

enum class ExprOp {
    Number,
    Pi,
    Variable,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
    Log,
    Min,
    Max,
};

// Immutable scalar expression tree. Copies share structure.
class Expr {
public:
    struct Node {
        ExprOp op;
        double value = 0.0;
        std::string name;
        std::vector<std::shared_ptr<const Node>> args;
    };

    Expr() = default;

    static Expr number(double v);
    static Expr variable(std::string name);
    static Expr unary(ExprOp op, Expr a);
    static Expr binary(ExprOp op, Expr a, Expr b);

    double eval(const Bindings& bindings) const;
    std::set<std::string> free_variables() const;

    // Canonical text with minimal parentheses; reparses to an equal tree.
    std::string str() const;

    // Replaces every occurrence of variable `from` by `to`.
    Expr substitute(std::string_view from, const Expr& to) const;

    bool empty() const noexcept { return root_ == nullptr; }
    const Node& root() const { return *root_; }

private:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    friend class ExprParser;

    std::shared_ptr<const Node> root_;
};

// Grammar (lowest to highest): + -, * /, unary -, ^ (right associative),
// atoms: numbers, names, pi, sin cos exp abs sqrt log (1 arg), min max (2 args).
Expr parse_expr(std::string_view text);

double eval_expr(const Expr& e, const Bindings& bindings);

enum class DiffScheme {
    Central,    // step sqrt(eps) * max(1, |p|), second order
    FivePoint,  // step eps^(1/5) * max(1, |p|), fourth order
};

double diff_expr_numeric(const Expr& e, std::string_view var, const Bindings& point,
                         DiffScheme scheme = DiffScheme::Central);

// Expression with variables resolved to positions in a value array. Used on
// hot paths (vector fields) where map lookups would dominate.
class CompiledExpr {
public:
    using SlotMap = std::map<std::string, int, std::less<>>;

    CompiledExpr() = default;
    // Throws EvalError naming the first variable missing from `slots`.
    CompiledExpr(const Expr& e, const SlotMap& slots);

    double operator()(std::span<const double> values) const;

private:
    struct Item {
        ExprOp op;
        double value;
        int slot;
        int a;
        int b;
    };
    int flatten(const Expr::Node& n, const SlotMap& slots);
    double eval(int idx, std::span<const double> values) const;

    std::vector<Item> items_;
    int root_ = -1;
};

}  // namespace perifix
