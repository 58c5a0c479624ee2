#include "hbubble/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace hbubble::expr {

namespace {

bool is_number(const NodePtr& n, double v) { return n->op == Op::Number && n->value == v; }

bool depends_on_u(const NodePtr& n) {
    if (!n) return false;
    switch (n->op) {
        case Op::Var:
        case Op::Radius:
        case Op::UnitComp:
        case Op::UnitDeriv:
            return true;
        default:
            return depends_on_u(n->lhs) || depends_on_u(n->rhs);
    }
}

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0, int index = 0,
             int index2 = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->index = index;
    n->index2 = index2;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr radius() { return make(Op::Radius); }
NodePtr unit_comp(int i) { return make(Op::UnitComp, nullptr, nullptr, 0.0, i); }
NodePtr unit_deriv(int i, int j) {
    return make(Op::UnitDeriv, nullptr, nullptr, 0.0, std::min(i, j), std::max(i, j));
}

double apply_unary(Op op, double a) {
    switch (op) {
        case Op::Neg: return -a;
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Exp: return std::exp(a);
        case Op::Log: return std::log(a);
        case Op::Tanh: return std::tanh(a);
        case Op::Sqrt: return std::sqrt(a);
        case Op::Atan: return std::atan(a);
        default: return a;
    }
}

double apply_binary(Op op, double a, double b) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div: return a / b;
        case Op::Pow: return std::pow(a, b);
        default: return 0.0;
    }
}

struct Geometry {
    double r;
    Vec3 uhat;  // zero at the origin
};

Geometry geometry_of(const Vec3& u) {
    const double r = norm(u);
    return {r, r > 0.0 ? u / r : Vec3{}};
}

double unit_deriv_value(const Geometry& g, int i, int j) {
    if (g.r == 0.0) return 0.0;
    return ((i == j ? 1.0 : 0.0) - g.uhat[i] * g.uhat[j]) / g.r;
}

}  // namespace

NodePtr number(double v) { return make(Op::Number, nullptr, nullptr, v); }
NodePtr variable(int i) { return make(Op::Var, nullptr, nullptr, 0.0, i); }

NodePtr unary(Op op, NodePtr a) {
    if (a->op == Op::Number) return number(apply_unary(op, a->value));
    if (op == Op::Neg && a->op == Op::Neg) return a->lhs;
    return make(op, std::move(a));
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
    if (a->op == Op::Number && b->op == Op::Number) return number(apply_binary(op, a->value, b->value));
    switch (op) {
        case Op::Add:
            if (is_number(a, 0.0)) return b;
            if (is_number(b, 0.0)) return a;
            break;
        case Op::Sub:
            if (is_number(b, 0.0)) return a;
            if (is_number(a, 0.0)) return unary(Op::Neg, b);
            break;
        case Op::Mul:
            if (is_number(a, 0.0) || is_number(b, 0.0)) return number(0.0);
            if (is_number(a, 1.0)) return b;
            if (is_number(b, 1.0)) return a;
            if (is_number(a, -1.0)) return unary(Op::Neg, b);
            if (is_number(b, -1.0)) return unary(Op::Neg, a);
            break;
        case Op::Div:
            if (is_number(a, 0.0)) return number(0.0);
            if (is_number(b, 1.0)) return a;
            break;
        case Op::Pow:
            if (is_number(b, 1.0)) return a;
            if (is_number(b, 0.0)) return number(1.0);
            break;
        default:
            break;
    }
    return make(op, std::move(a), std::move(b));
}

NodePtr simplify(const NodePtr& n) {
    if (!n) return n;
    switch (n->op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Pow:
            return binary(n->op, simplify(n->lhs), simplify(n->rhs));
        case Op::Neg:
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
        case Op::Log:
        case Op::Tanh:
        case Op::Sqrt:
        case Op::Atan:
            return unary(n->op, simplify(n->lhs));
        default:
            return n;
    }
}

NodePtr differentiate(const NodePtr& n, int k) {
    const NodePtr& a = n->lhs;
    const NodePtr& b = n->rhs;
    switch (n->op) {
        case Op::Number:
        case Op::Param:
            return number(0.0);
        case Op::Var:
            return number(n->index == k ? 1.0 : 0.0);
        case Op::Radius:
            return unit_comp(k);
        case Op::UnitComp:
            return unit_deriv(n->index, k);
        case Op::UnitDeriv: {
            const int i = n->index;
            const int j = n->index2;
            auto first = binary(Op::Add, binary(Op::Mul, unit_deriv(i, k), unit_comp(j)),
                                binary(Op::Mul, unit_comp(i), unit_deriv(j, k)));
            auto second = binary(Op::Mul, n, unit_comp(k));
            return unary(Op::Neg, binary(Op::Div, binary(Op::Add, first, second), radius()));
        }
        case Op::Add:
            return binary(Op::Add, differentiate(a, k), differentiate(b, k));
        case Op::Sub:
            return binary(Op::Sub, differentiate(a, k), differentiate(b, k));
        case Op::Mul:
            return binary(Op::Add, binary(Op::Mul, differentiate(a, k), b),
                          binary(Op::Mul, a, differentiate(b, k)));
        case Op::Div: {
            auto num = binary(Op::Sub, binary(Op::Mul, differentiate(a, k), b),
                              binary(Op::Mul, a, differentiate(b, k)));
            return binary(Op::Div, num, binary(Op::Pow, b, number(2.0)));
        }
        case Op::Pow: {
            auto da = differentiate(a, k);
            if (!depends_on_u(b)) {
                auto exponent = binary(Op::Sub, b, number(1.0));
                return binary(Op::Mul, binary(Op::Mul, b, binary(Op::Pow, a, exponent)), da);
            }
            auto db = differentiate(b, k);
            auto inner = binary(Op::Add, binary(Op::Mul, db, unary(Op::Log, a)),
                                binary(Op::Div, binary(Op::Mul, b, da), a));
            return binary(Op::Mul, n, inner);
        }
        case Op::Neg:
            return unary(Op::Neg, differentiate(a, k));
        case Op::Sin:
            return binary(Op::Mul, unary(Op::Cos, a), differentiate(a, k));
        case Op::Cos:
            return unary(Op::Neg, binary(Op::Mul, unary(Op::Sin, a), differentiate(a, k)));
        case Op::Exp:
            return binary(Op::Mul, n, differentiate(a, k));
        case Op::Log:
            return binary(Op::Div, differentiate(a, k), a);
        case Op::Tanh:
            return binary(Op::Mul, binary(Op::Sub, number(1.0), binary(Op::Pow, n, number(2.0))),
                          differentiate(a, k));
        case Op::Sqrt:
            return binary(Op::Div, differentiate(a, k), binary(Op::Mul, number(2.0), n));
        case Op::Atan:
            return binary(Op::Div, differentiate(a, k),
                          binary(Op::Add, number(1.0), binary(Op::Pow, a, number(2.0))));
    }
    return number(0.0);
}

namespace {

double eval_node(const NodePtr& n, const Vec3& u, const Geometry& g, std::span<const double> params) {
    switch (n->op) {
        case Op::Number: return n->value;
        case Op::Param: return params[static_cast<std::size_t>(n->index)];
        case Op::Var: return u[n->index];
        case Op::Radius: return g.r;
        case Op::UnitComp: return g.uhat[n->index];
        case Op::UnitDeriv: return unit_deriv_value(g, n->index, n->index2);
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Pow:
            return apply_binary(n->op, eval_node(n->lhs, u, g, params), eval_node(n->rhs, u, g, params));
        default:
            return apply_unary(n->op, eval_node(n->lhs, u, g, params));
    }
}

}  // namespace

double evaluate(const NodePtr& n, const Vec3& u, std::span<const double> params) {
    return eval_node(n, u, geometry_of(u), params);
}

Program::Program(const NodePtr& root) { emit(root); }

void Program::emit(const NodePtr& n) {
    if (n->lhs) emit(n->lhs);
    if (n->rhs) emit(n->rhs);
    code_.push_back({n->op, n->value, n->index, n->index2});
}

double Program::operator()(const Vec3& u, std::span<const double> params) const {
    constexpr std::size_t kDepth = 64;
    double stack[kDepth];
    std::size_t top = 0;
    const Geometry g = geometry_of(u);
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::Number: stack[top++] = in.value; break;
            case Op::Param: stack[top++] = params[static_cast<std::size_t>(in.index)]; break;
            case Op::Var: stack[top++] = u[in.index]; break;
            case Op::Radius: stack[top++] = g.r; break;
            case Op::UnitComp: stack[top++] = g.uhat[in.index]; break;
            case Op::UnitDeriv: stack[top++] = unit_deriv_value(g, in.index, in.index2); break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
            case Op::Pow:
                --top;
                stack[top - 1] = apply_binary(in.op, stack[top - 1], stack[top]);
                break;
            default:
                stack[top - 1] = apply_unary(in.op, stack[top - 1]);
                break;
        }
        if (top >= kDepth) throw std::runtime_error("expression nesting too deep to evaluate");
    }
    return top == 0 ? 0.0 : stack[top - 1];
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::map<std::string, double>& params, ParsedExpression& out)
        : text_(text), params_(params), out_(out) {}

    NodePtr run() {
        auto root = parse_expr();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return root;
    }

private:
    std::string_view text_;
    const std::map<std::string, double>& params_;
    ParsedExpression& out_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) lhs = binary(Op::Add, lhs, parse_term());
            else if (accept('-')) lhs = binary(Op::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = binary(Op::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = binary(Op::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return unary(Op::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_primary();
        if (accept('^')) return binary(Op::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        std::string buf(text_.substr(start));
        char* end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        const auto used = static_cast<std::size_t>(end - buf.c_str());
        if (used == 0) throw ParseError("malformed number", start);
        pos_ += used;
        return number(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));

        static const std::map<std::string, Op, std::less<>> functions = {
            {"sin", Op::Sin}, {"cos", Op::Cos},   {"exp", Op::Exp},   {"log", Op::Log},
            {"tanh", Op::Tanh}, {"sqrt", Op::Sqrt}, {"atan", Op::Atan},
        };
        if (auto f = functions.find(name); f != functions.end()) {
            expect('(');
            auto arg = parse_expr();
            expect(')');
            return unary(f->second, arg);
        }
        if (name == "u1" || name == "u2" || name == "u3") {
            out_.uses_u = true;
            return variable(name[1] - '1');
        }
        if (name == "r") {
            out_.uses_r = true;
            return radius();
        }
        if (name == "pi") return number(std::numbers::pi);
        if (auto p = params_.find(name); p != params_.end()) {
            auto it = std::find(out_.param_names.begin(), out_.param_names.end(), name);
            if (it == out_.param_names.end()) {
                out_.param_names.push_back(name);
                out_.param_values.push_back(p->second);
                it = out_.param_names.end() - 1;
            }
            return make(Op::Param, nullptr, nullptr, 0.0, static_cast<int>(it - out_.param_names.begin()));
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

bool even_integer(const NodePtr& n) {
    if (n->op != Op::Number) return false;
    const double v = n->value;
    return v > 0.0 && std::floor(v) == v && std::fmod(v, 2.0) == 0.0;
}

// Conservative sign analysis: true only when the subtree is provably > 0.
bool strictly_positive(const NodePtr& n, std::span<const double> params) {
    switch (n->op) {
        case Op::Number: return n->value > 0.0;
        case Op::Param: return params[static_cast<std::size_t>(n->index)] > 0.0;
        case Op::Exp: return true;
        case Op::Add:
            return (strictly_positive(n->lhs, params) && !depends_on_u(n->rhs) &&
                    evaluate(n->rhs, {}, params) >= 0.0) ||
                   (strictly_positive(n->rhs, params) && !depends_on_u(n->lhs) &&
                    evaluate(n->lhs, {}, params) >= 0.0) ||
                   (strictly_positive(n->lhs, params) && strictly_positive(n->rhs, params));
        case Op::Mul:
        case Op::Div:
            return strictly_positive(n->lhs, params) && strictly_positive(n->rhs, params);
        default: return false;
    }
}

bool nonnegative(const NodePtr& n, std::span<const double> params) {
    if (strictly_positive(n, params)) return true;
    switch (n->op) {
        case Op::Number: return n->value >= 0.0;
        case Op::Radius: return true;
        case Op::Pow: return even_integer(n->rhs);
        case Op::Add:
        case Op::Mul: return nonnegative(n->lhs, params) && nonnegative(n->rhs, params);
        default: return false;
    }
}

bool strictly_positive_plus(const NodePtr& n, std::span<const double> params) {
    if (strictly_positive(n, params)) return true;
    if (n->op == Op::Add)
        return (strictly_positive(n->lhs, params) && nonnegative(n->rhs, params)) ||
               (strictly_positive(n->rhs, params) && nonnegative(n->lhs, params));
    return false;
}

void scan_kinks(const NodePtr& n, const NodePtr& parent, std::span<const double> params,
                std::vector<std::string>& warnings) {
    if (!n) return;
    if (n->op == Op::Radius) {
        const bool even_power = parent && parent->op == Op::Pow && parent->lhs == n && even_integer(parent->rhs);
        const std::string msg = "r is not differentiable at u = 0 unless raised to an even power";
        if (!even_power && std::find(warnings.begin(), warnings.end(), msg) == warnings.end())
            warnings.push_back(msg);
    }
    if (n->op == Op::Sqrt && !strictly_positive_plus(n->lhs, params)) {
        const std::string msg = "sqrt is not differentiable where its argument vanishes";
        if (std::find(warnings.begin(), warnings.end(), msg) == warnings.end()) warnings.push_back(msg);
    }
    scan_kinks(n->lhs, n, params, warnings);
    scan_kinks(n->rhs, n, params, warnings);
}

int precedence(const NodePtr& n) {
    switch (n->op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        case Op::Number: return n->value < 0.0 ? 3 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const NodePtr& n, std::span<const std::string> names, std::string& out);

void print_child(const NodePtr& child, bool parens, std::span<const std::string> names, std::string& out) {
    if (parens) out += '(';
    print(child, names, out);
    if (parens) out += ')';
}

void print(const NodePtr& n, std::span<const std::string> names, std::string& out) {
    static const char* var_names[] = {"u1", "u2", "u3"};
    switch (n->op) {
        case Op::Number: out += format_number(n->value); return;
        case Op::Param: out += names[static_cast<std::size_t>(n->index)]; return;
        case Op::Var: out += var_names[n->index]; return;
        case Op::Radius: out += 'r'; return;
        case Op::UnitComp: out += std::string("(") + var_names[n->index] + "/r)"; return;
        case Op::UnitDeriv:
            out += std::string("uhat'(") + var_names[n->index] + "," + var_names[n->index2] + ")";
            return;
        case Op::Neg:
            out += '-';
            print_child(n->lhs, precedence(n->lhs) <= 3, names, out);
            return;
        case Op::Pow:
            print_child(n->lhs, precedence(n->lhs) <= 4, names, out);
            out += '^';
            print_child(n->rhs, precedence(n->rhs) < 5, names, out);
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const int p = precedence(n);
            const char sym = n->op == Op::Add ? '+' : n->op == Op::Sub ? '-' : n->op == Op::Mul ? '*' : '/';
            print_child(n->lhs, precedence(n->lhs) < p, names, out);
            out += ' ';
            out += sym;
            out += ' ';
            const bool right_parens = precedence(n->rhs) < p ||
                                      (precedence(n->rhs) == p && (n->op == Op::Sub || n->op == Op::Div)) ||
                                      (n->rhs->op == Op::Number && n->rhs->value < 0.0);
            print_child(n->rhs, right_parens, names, out);
            return;
        }
        default: {
            static const std::map<Op, const char*> fn = {
                {Op::Sin, "sin"},   {Op::Cos, "cos"},   {Op::Exp, "exp"},  {Op::Log, "log"},
                {Op::Tanh, "tanh"}, {Op::Sqrt, "sqrt"}, {Op::Atan, "atan"},
            };
            out += fn.at(n->op);
            out += '(';
            print(n->lhs, names, out);
            out += ')';
            return;
        }
    }
}

}  // namespace

ParsedExpression parse(std::string_view text, const std::map<std::string, double>& params) {
    ParsedExpression out;
    Parser p(text, params, out);
    out.root = p.run();
    scan_kinks(out.root, nullptr, out.param_values, out.warnings);
    return out;
}

std::string to_string(const NodePtr& n, std::span<const std::string> param_names) {
    std::string out;
    print(n, param_names, out);
    return out;
}

}  // namespace hbubble::expr
