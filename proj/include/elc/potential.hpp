#pragma once

// Potentials U: R^n -> R written in a small expression language:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)*
//   primary := number | x<i> | fn '(' expr ')' | '(' expr ')'
//   fn      := sin | cos | exp | sqrt
//
// Variables are x1..xn. Evaluation never propagates NaN: a square root of a
// negative number, a division by zero or a non-finite intermediate raises a
// DomainError carrying the byte offset of the offending subexpression.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "elc/jet.hpp"
#include "elc/torus_rep.hpp"

namespace elc {

inline constexpr int kMaxDimension = 4096;

enum class NodeKind { Number, Variable, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt };

struct Node {
    NodeKind kind;
    std::size_t offset = 0;  // byte offset of the subexpression in the source
    double number = 0.0;     // Number
    int index = 0;           // Variable (0-based)
    int exponent = 0;        // Pow
    int lhs = -1;
    int rhs = -1;
};

class Expr {
public:
    Expr() = default;

    int dimension() const noexcept { return n_; }
    const std::vector<Node>& nodes() const noexcept { return *nodes_; }
    int root() const noexcept { return root_; }

    double eval(const Eigen::VectorXd& q) const;
    Jet1<double> jet1(const Eigen::VectorXd& q) const;
    Jet2<double> jet2(const Eigen::VectorXd& q) const;

    Eigen::VectorXd gradient(const Eigen::VectorXd& q) const { return jet1(q).grad; }

    friend Expr parse_expr(std::string_view text, int n);

private:
    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_ = -1;
    int n_ = 0;
};

Expr parse_expr(std::string_view text, int n);

/// Canonical text; parse_expr(print(e)) rebuilds the same tree.
std::string print(const Expr& e);

struct InvarianceCheck {
    bool invariant = true;
    double worst = 0.0;  // max |U(g q) - U(q)| / (1 + |U(q)|)
    Eigen::VectorXd worst_point;
};

/// Samples q uniformly in [-box, box]^n and angles uniformly in [0, 2 pi).
InvarianceCheck check_invariance(const Expr& u, const SkewGeneratorSet& gens, int samples, double tol, double box,
                                 std::mt19937_64& rng);

}  // namespace elc
