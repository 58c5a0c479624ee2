#pragma once

// Scalar expression language over a point u = (u1, u2, u3) of R^3.
//
// Grammar (whitespace insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?              right associative
//   primary := number | 'pi' | 'u1' | 'u2' | 'u3' | 'r' | param
//            | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | tanh | sqrt | atan | log
//
// `r` is |u|. Named parameters are bound at parse time but kept symbolic so
// the pretty printer reproduces them.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hbubble/vec.hpp"

namespace hbubble::expr {

enum class Op {
    Number,
    Param,
    Var,         // u_index
    Radius,      // |u|
    UnitComp,    // u_index / |u|, taken as 0 at the origin
    UnitDeriv,   // (delta_ij - uhat_i uhat_j) / |u|, taken as 0 at the origin
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Tanh,
    Sqrt,
    Atan,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Number;
    double value = 0.0;
    int index = 0;   // variable / parameter / first unit index
    int index2 = 0;  // second index of UnitDeriv
    NodePtr lhs;
    NodePtr rhs;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t offset)
        : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Flat postfix program; evaluation uses a small fixed stack and no allocation.
class Program {
public:
    Program() = default;
    explicit Program(const NodePtr& root);

    double operator()(const Vec3& u, std::span<const double> params) const;
    bool is_constant_zero() const { return code_.size() == 1 && code_[0].op == Op::Number && code_[0].value == 0.0; }

private:
    struct Instr {
        Op op;
        double value;
        int index;
        int index2;
    };
    std::vector<Instr> code_;
    void emit(const NodePtr& n);
};

struct ParsedExpression {
    NodePtr root;
    std::vector<std::string> param_names;
    std::vector<double> param_values;
    std::vector<std::string> warnings;  // non-differentiable constructs
    bool uses_u = false;                // references u1, u2 or u3
    bool uses_r = false;
};

ParsedExpression parse(std::string_view text, const std::map<std::string, double>& params = {});

// Symbolic derivative with respect to u_var (0, 1, 2), lightly simplified.
NodePtr differentiate(const NodePtr& n, int var);
NodePtr simplify(const NodePtr& n);

std::string to_string(const NodePtr& n, std::span<const std::string> param_names);

double evaluate(const NodePtr& n, const Vec3& u, std::span<const double> params);

// Builders used by the parser, the differentiator and tests.
NodePtr number(double v);
NodePtr variable(int i);
NodePtr binary(Op op, NodePtr a, NodePtr b);
NodePtr unary(Op op, NodePtr a);

}  // namespace hbubble::expr
