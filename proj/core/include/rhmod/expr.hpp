#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rhmod/types.hpp"

namespace rhmod {

// Parse error with a 0-based character position into the source text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          pos(position) {}
    std::size_t pos;
};

// Expression tree over one complex variable "z".
// Grammar (see README): + - * / ^, unary minus, exp/log/sqrt, complex
// literals as <number> or <number>i, the imaginary unit "i".
class Expr {
public:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt };

    Expr() : op_(Op::Const), value_(0.0) {}

    static Expr parse(const std::string& text);

    cplx eval(cplx z) const;
    Expr derivative() const;
    std::string to_string() const;

    bool is_zero() const { return op_ == Op::Const && value_ == cplx(0.0); }

    Expr(const Expr& other) { *this = other; }
    Expr& operator=(const Expr& other);
    Expr(Expr&&) noexcept = default;
    Expr& operator=(Expr&&) noexcept = default;

private:
    Op op_;
    cplx value_{};                      // Op::Const
    std::unique_ptr<Expr> lhs_, rhs_;   // children

    static Expr constant(cplx v);
    static Expr var();
    static Expr node(Op op, Expr l);
    static Expr node(Op op, Expr l, Expr r);

    std::string to_string_prec(int parent_prec) const;
    friend class Parser;
};

} // namespace rhmod
