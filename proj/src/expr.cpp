#include "perifix/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "perifix/errors.hpp"

namespace perifix {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct FunctionInfo {
    std::string_view name;
    ExprOp op;
    int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", ExprOp::Sin, 1},   {"cos", ExprOp::Cos, 1}, {"exp", ExprOp::Exp, 1}, {"abs", ExprOp::Abs, 1},
    {"sqrt", ExprOp::Sqrt, 1}, {"log", ExprOp::Log, 1}, {"min", ExprOp::Min, 2}, {"max", ExprOp::Max, 2},
};

const FunctionInfo* find_function(std::string_view name) {
    for (const auto& f : kFunctions)
        if (f.name == name) return &f;
    return nullptr;
}

std::string_view function_name(ExprOp op) {
    for (const auto& f : kFunctions)
        if (f.op == op) return f.name;
    return "?";
}

double checked(double r, const char* what) {
    if (!std::isfinite(r)) throw EvalError(std::string("domain error in ") + what);
    return r;
}

// Single definition of every operator, shared by the tree and compiled paths.
double apply_op(ExprOp op, double a, double b) {
    switch (op) {
        case ExprOp::Negate: return -a;
        case ExprOp::Add: return checked(a + b, "+");
        case ExprOp::Sub: return checked(a - b, "-");
        case ExprOp::Mul: return checked(a * b, "*");
        case ExprOp::Div:
            if (b == 0.0) throw EvalError("division by zero");
            return checked(a / b, "/");
        case ExprOp::Pow:
            if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
            return checked(std::pow(a, b), "^");
        case ExprOp::Sin: return checked(std::sin(a), "sin");
        case ExprOp::Cos: return checked(std::cos(a), "cos");
        case ExprOp::Exp: return checked(std::exp(a), "exp");
        case ExprOp::Abs: return std::abs(a);
        case ExprOp::Sqrt:
            if (a < 0.0) throw EvalError("domain error in sqrt: negative argument");
            return std::sqrt(a);
        case ExprOp::Log:
            if (a <= 0.0) throw EvalError("domain error in log: nonpositive argument");
            return std::log(a);
        case ExprOp::Min: return std::min(a, b);
        case ExprOp::Max: return std::max(a, b);
        default: break;
    }
    throw EvalError("invalid operator");
}

double eval_node(const Expr::Node& n, const Bindings& b) {
    switch (n.op) {
        case ExprOp::Number: return n.value;
        case ExprOp::Pi: return std::numbers::pi;
        case ExprOp::Variable: {
            auto it = b.find(n.name);
            if (it == b.end()) throw EvalError("unbound variable '" + n.name + "'");
            return it->second;
        }
        default: break;
    }
    const double a = eval_node(*n.args[0], b);
    const double c = n.args.size() > 1 ? eval_node(*n.args[1], b) : 0.0;
    return apply_op(n.op, a, c);
}

void collect_vars(const Expr::Node& n, std::set<std::string>& out) {
    if (n.op == ExprOp::Variable) out.insert(n.name);
    for (const auto& a : n.args) collect_vars(*a, out);
}

// Binding strength used for printing: higher binds tighter.
int precedence(const Expr::Node& n) {
    switch (n.op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Negate: return 3;
        case ExprOp::Pow: return 4;
        case ExprOp::Number: return (n.value < 0 || std::signbit(n.value)) ? 3 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(v));
    std::string s(buf);
    // Shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char b2[64];
        std::snprintf(b2, sizeof b2, "%.*g", prec, std::abs(v));
        if (std::strtod(b2, nullptr) == std::abs(v)) {
            s = b2;
            break;
        }
    }
    return std::signbit(v) ? "-" + s : s;
}

void print_node(const Expr::Node& n, std::string& out);

void print_child(const Expr::Node& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const Expr::Node& n, std::string& out) {
    switch (n.op) {
        case ExprOp::Number: out += format_number(n.value); return;
        case ExprOp::Pi: out += "pi"; return;
        case ExprOp::Variable: out += n.name; return;
        case ExprOp::Negate:
            out += '-';
            print_child(*n.args[0], 3, out);
            return;
        case ExprOp::Add:
        case ExprOp::Sub:
        case ExprOp::Mul:
        case ExprOp::Div: {
            const int p = precedence(n);
            const char* sym = n.op == ExprOp::Add ? " + " : n.op == ExprOp::Sub ? " - " : n.op == ExprOp::Mul ? " * " : " / ";
            print_child(*n.args[0], p, out);
            out += sym;
            print_child(*n.args[1], p + 1, out);
            return;
        }
        case ExprOp::Pow:
            print_child(*n.args[0], 5, out);
            out += '^';
            print_child(*n.args[1], 3, out);
            return;
        default:
            out += function_name(n.op);
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                print_node(*n.args[i], out);
            }
            out += ')';
            return;
    }
}

NodePtr substitute_node(const NodePtr& n, std::string_view from, const NodePtr& to) {
    if (n->op == ExprOp::Variable) return n->name == from ? to : n;
    if (n->args.empty()) return n;
    auto copy = std::make_shared<Expr::Node>(*n);
    for (auto& a : copy->args) a = substitute_node(a, from, to);
    return copy;
}

}  // namespace

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr parse() {
        auto root = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return Expr(std::move(root));
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError("syntax error: " + what, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make(ExprOp op, std::vector<NodePtr> args) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op;
        n->args = std::move(args);
        return n;
    }

    NodePtr parse_sum() {
        auto lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = make(ExprOp::Add, {lhs, parse_product()});
            else if (accept('-')) lhs = make(ExprOp::Sub, {lhs, parse_product()});
            else return lhs;
        }
    }

    NodePtr parse_product() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = make(ExprOp::Mul, {lhs, parse_unary()});
            else if (accept('/')) lhs = make(ExprOp::Div, {lhs, parse_unary()});
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make(ExprOp::Negate, {parse_unary()});
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_atom();
        if (accept('^')) return make(ExprOp::Pow, {base, parse_unary()});
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto is_digit = [&](std::size_t i) { return i < text_.size() && text_[i] >= '0' && text_[i] <= '9'; };
        while (is_digit(pos_)) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (is_digit(pos_)) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (is_digit(p)) {
                pos_ = p;
                while (is_digit(pos_)) ++pos_;
            }
        }
        double v = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        auto n = std::make_shared<Expr::Node>();
        n->op = ExprOp::Number;
        n->value = v;
        return n;
    }

    NodePtr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            const FunctionInfo* fn = find_function(name);
            if (!fn) {
                pos_ = start;
                fail("unknown function '" + std::string(name) + "'");
            }
            ++pos_;
            std::vector<NodePtr> args{parse_sum()};
            while (accept(',')) args.push_back(parse_sum());
            if (!accept(')')) fail("expected ')'");
            if (static_cast<int>(args.size()) != fn->arity) {
                pos_ = start;
                fail(std::string(name) + " expects " + std::to_string(fn->arity) + " argument(s)");
            }
            return make(fn->op, std::move(args));
        }
        auto n = std::make_shared<Expr::Node>();
        if (name == "pi") {
            n->op = ExprOp::Pi;
        } else {
            n->op = ExprOp::Variable;
            n->name = std::string(name);
        }
        return n;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

Expr Expr::number(double v) {
    auto n = std::make_shared<Node>();
    n->op = ExprOp::Number;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = name == "pi" ? ExprOp::Pi : ExprOp::Variable;
    if (n->op == ExprOp::Variable) n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::unary(ExprOp op, Expr a) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(a.root_)};
    return Expr(std::move(n));
}

Expr Expr::binary(ExprOp op, Expr a, Expr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(a.root_), std::move(b.root_)};
    return Expr(std::move(n));
}

double Expr::eval(const Bindings& bindings) const {
    if (!root_) throw EvalError("empty expression");
    return eval_node(*root_, bindings);
}

std::set<std::string> Expr::free_variables() const {
    std::set<std::string> out;
    if (root_) collect_vars(*root_, out);
    return out;
}

std::string Expr::str() const {
    std::string out;
    if (root_) print_node(*root_, out);
    return out;
}

Expr Expr::substitute(std::string_view from, const Expr& to) const {
    if (!root_) return *this;
    return Expr(substitute_node(root_, from, to.root_));
}

Expr parse_expr(std::string_view text) { return ExprParser(text).parse(); }

double eval_expr(const Expr& e, const Bindings& bindings) { return e.eval(bindings); }

double diff_expr_numeric(const Expr& e, std::string_view var, const Bindings& point, DiffScheme scheme) {
    auto it = point.find(var);
    if (it == point.end()) throw EvalError("unbound variable '" + std::string(var) + "'");
    const double p = it->second;
    const double scale = std::max(1.0, std::abs(p));
    const double eps = std::numeric_limits<double>::epsilon();
    double h = scheme == DiffScheme::Central ? std::sqrt(eps) * scale : std::pow(eps, 0.2) * scale;
    // Make p + h exactly representable so the divisor matches the abscissae.
    volatile double ph = p + h;
    h = ph - p;

    Bindings b = point;
    auto at = [&](double v) {
        b.find(var)->second = v;
        return e.eval(b);
    };
    if (scheme == DiffScheme::Central) return (at(p + h) - at(p - h)) / (2.0 * h);
    return (-at(p + 2 * h) + 8.0 * at(p + h) - 8.0 * at(p - h) + at(p - 2 * h)) / (12.0 * h);
}

CompiledExpr::CompiledExpr(const Expr& e, const SlotMap& slots) {
    if (e.empty()) throw EvalError("empty expression");
    root_ = flatten(e.root(), slots);
}

int CompiledExpr::flatten(const Expr::Node& n, const SlotMap& slots) {
    Item item{n.op, n.value, -1, -1, -1};
    if (n.op == ExprOp::Pi) {
        item.op = ExprOp::Number;
        item.value = std::numbers::pi;
    } else if (n.op == ExprOp::Variable) {
        auto it = slots.find(n.name);
        if (it == slots.end()) throw EvalError("unbound variable '" + n.name + "'");
        item.slot = it->second;
    }
    if (!n.args.empty()) item.a = flatten(*n.args[0], slots);
    if (n.args.size() > 1) item.b = flatten(*n.args[1], slots);
    items_.push_back(item);
    return static_cast<int>(items_.size()) - 1;
}

double CompiledExpr::eval(int idx, std::span<const double> values) const {
    const Item& it = items_[static_cast<std::size_t>(idx)];
    switch (it.op) {
        case ExprOp::Number: return it.value;
        case ExprOp::Variable: return values[static_cast<std::size_t>(it.slot)];
        default: break;
    }
    const double a = eval(it.a, values);
    const double b = it.b >= 0 ? eval(it.b, values) : 0.0;
    return apply_op(it.op, a, b);
}

double CompiledExpr::operator()(std::span<const double> values) const {
    if (root_ < 0) throw EvalError("empty expression");
    return eval(root_, values);
}

}  // namespace perifix
