#pragma once

// Real coefficient expressions over the torus coordinates, e.g. "1 + 0.9*sin(x3)".
//
// Grammar, loosest first:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?            right-associative
//   atom    := number | pi | xJ | yJ | name '(' sum ')' | '(' sum ')'
// with functions sin, cos, exp, log.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gauduchon/grid.hpp"

namespace gauduchon {

class Expression {
public:
    enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log };

    struct Node {
        Kind kind;
        double value = 0.0;  // Number
        int dim = -1;        // Variable: real dimension, x_j -> 2(j-1), y_j -> 2j-1
        std::size_t offset = 0;
        std::vector<int> args;  // indices into the node table
    };

    // Variables x1..xn, y1..yn; anything else is a ParseError with its byte offset.
    static Expression parse(std::string_view src, int n);

    const std::string& source() const noexcept { return source_; }
    int n() const noexcept { return n_; }

    // Pointwise value; `coords` has length 2n. EvaluationError (point 0) on a domain error.
    double evaluate(std::span<const double> coords) const;
    // Samples on the grid nodes; EvaluationError names the first failing point.
    GridFunction evaluate(const GridShape& shape) const;

    // Bitmask of the real dimensions the expression reads.
    std::uint32_t dimensions() const;

    // "Add(1, Mul(0.9, Sin(Var x3)))".
    std::string tree() const;

private:
    double eval(int node, std::span<const double> coords, std::size_t point) const;
    std::string tree(int node) const;

    std::string source_;
    int n_ = 0;
    std::vector<Node> nodes_;
    int root_ = -1;

    friend class ExpressionParser;
};

}  // namespace gauduchon
