#include "rhmod/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace rhmod {

Expr& Expr::operator=(const Expr& other) {
    if (this == &other) return *this;
    op_ = other.op_;
    value_ = other.value_;
    lhs_ = other.lhs_ ? std::make_unique<Expr>(*other.lhs_) : nullptr;
    rhs_ = other.rhs_ ? std::make_unique<Expr>(*other.rhs_) : nullptr;
    return *this;
}

Expr Expr::constant(cplx v) {
    Expr e;
    e.op_ = Op::Const;
    e.value_ = v;
    return e;
}

Expr Expr::var() {
    Expr e;
    e.op_ = Op::Var;
    return e;
}

Expr Expr::node(Op op, Expr l) {
    Expr e;
    e.op_ = op;
    e.lhs_ = std::make_unique<Expr>(std::move(l));
    return e;
}

Expr Expr::node(Op op, Expr l, Expr r) {
    Expr e;
    e.op_ = op;
    e.lhs_ = std::make_unique<Expr>(std::move(l));
    e.rhs_ = std::make_unique<Expr>(std::move(r));
    return e;
}

cplx Expr::eval(cplx z) const {
    switch (op_) {
    case Op::Const: return value_;
    case Op::Var:   return z;
    case Op::Add:   return lhs_->eval(z) + rhs_->eval(z);
    case Op::Sub:   return lhs_->eval(z) - rhs_->eval(z);
    case Op::Mul:   return lhs_->eval(z) * rhs_->eval(z);
    case Op::Div:   return lhs_->eval(z) / rhs_->eval(z);
    case Op::Neg:   return -lhs_->eval(z);
    case Op::Exp:   return std::exp(lhs_->eval(z));
    case Op::Log:   return std::log(lhs_->eval(z));
    case Op::Sqrt:  return std::sqrt(lhs_->eval(z));
    case Op::Pow: {
        cplx base = lhs_->eval(z);
        // integer powers evaluated by repeated multiplication: exact for
        // polynomial data, no log-branch artifacts on the negative axis
        if (rhs_->op_ == Op::Const && rhs_->value_.imag() == 0.0) {
            double pr = rhs_->value_.real();
            if (pr == std::floor(pr) && std::abs(pr) <= 64) {
                long n = static_cast<long>(pr);
                cplx acc(1.0);
                cplx b = n >= 0 ? base : cplx(1.0) / base;
                for (long k = std::labs(n); k > 0; --k) acc *= b;
                return acc;
            }
        }
        return std::pow(base, rhs_->eval(z));
    }
    }
    return {};
}

Expr Expr::derivative() const {
    switch (op_) {
    case Op::Const: return constant(0.0);
    case Op::Var:   return constant(1.0);
    case Op::Add:   return node(Op::Add, lhs_->derivative(), rhs_->derivative());
    case Op::Sub:   return node(Op::Sub, lhs_->derivative(), rhs_->derivative());
    case Op::Neg:   return node(Op::Neg, lhs_->derivative());
    case Op::Mul:
        return node(Op::Add,
                    node(Op::Mul, lhs_->derivative(), *rhs_),
                    node(Op::Mul, *lhs_, rhs_->derivative()));
    case Op::Div:
        // (f/g)' = (f'g - fg')/g^2
        return node(Op::Div,
                    node(Op::Sub,
                         node(Op::Mul, lhs_->derivative(), *rhs_),
                         node(Op::Mul, *lhs_, rhs_->derivative())),
                    node(Op::Mul, *rhs_, *rhs_));
    case Op::Exp:
        return node(Op::Mul, node(Op::Exp, *lhs_), lhs_->derivative());
    case Op::Log:
        return node(Op::Div, lhs_->derivative(), *lhs_);
    case Op::Sqrt:
        return node(Op::Div, lhs_->derivative(),
                    node(Op::Mul, constant(2.0), node(Op::Sqrt, *lhs_)));
    case Op::Pow: {
        if (rhs_->op_ == Op::Const) {
            // c*f^(c-1)*f'
            cplx c = rhs_->value_;
            return node(Op::Mul,
                        node(Op::Mul, constant(c), node(Op::Pow, *lhs_, constant(c - 1.0))),
                        lhs_->derivative());
        }
        // f^g = exp(g log f): derivative f^g*(g' log f + g f'/f)
        Expr t1 = node(Op::Mul, rhs_->derivative(), node(Op::Log, *lhs_));
        Expr t2 = node(Op::Div, node(Op::Mul, *rhs_, lhs_->derivative()), *lhs_);
        return node(Op::Mul, node(Op::Pow, *lhs_, *rhs_), node(Op::Add, std::move(t1), std::move(t2)));
    }
    }
    return {};
}

namespace {
std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

// precedence: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5
std::string Expr::to_string_prec(int parent_prec) const {
    int prec = 5;
    std::string s;
    switch (op_) {
    case Op::Const: {
        double re = value_.real(), im = value_.imag();
        if (im == 0.0) {
            s = fmt_num(re);
            if (re < 0) prec = 3;
        } else if (re == 0.0) {
            s = fmt_num(im) + "i";
            if (im < 0) prec = 3;
        } else {
            s = "(" + fmt_num(re) + (im >= 0 ? "+" : "-") + fmt_num(std::abs(im)) + "i)";
        }
        break;
    }
    case Op::Var: s = "z"; break;
    case Op::Add: prec = 1; s = lhs_->to_string_prec(1) + " + " + rhs_->to_string_prec(1); break;
    case Op::Sub: prec = 1; s = lhs_->to_string_prec(1) + " - " + rhs_->to_string_prec(2); break;
    case Op::Mul: prec = 2; s = lhs_->to_string_prec(2) + "*" + rhs_->to_string_prec(2); break;
    case Op::Div: prec = 2; s = lhs_->to_string_prec(2) + "/" + rhs_->to_string_prec(3); break;
    case Op::Neg: prec = 3; s = "-" + lhs_->to_string_prec(3); break;
    case Op::Pow: prec = 4; s = lhs_->to_string_prec(5) + "^" + rhs_->to_string_prec(5); break;
    case Op::Exp: s = "exp(" + lhs_->to_string_prec(0) + ")"; break;
    case Op::Log: s = "log(" + lhs_->to_string_prec(0) + ")"; break;
    case Op::Sqrt: s = "sqrt(" + lhs_->to_string_prec(0) + ")"; break;
    }
    if (prec < parent_prec) return "(" + s + ")";
    return s;
}

std::string Expr::to_string() const { return to_string_prec(0); }

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Expr run() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (eat('+')) e = Expr::node(Expr::Op::Add, std::move(e), parse_term());
            else if (eat('-')) e = Expr::node(Expr::Op::Sub, std::move(e), parse_term());
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        for (;;) {
            if (eat('*')) e = Expr::node(Expr::Op::Mul, std::move(e), parse_unary());
            else if (eat('/')) e = Expr::node(Expr::Op::Div, std::move(e), parse_unary());
            else return e;
        }
    }

    Expr parse_unary() {
        if (eat('-')) return Expr::node(Expr::Op::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (eat('^')) {
            // right-associative; exponent binds unary minus
            return Expr::node(Expr::Op::Pow, std::move(base), parse_unary());
        }
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // not an exponent after all
            }
        }
        double v;
        try {
            v = std::stod(text_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
        if (pos_ < text_.size() && text_[pos_] == 'i' &&
            !(pos_ + 1 < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
            ++pos_;
            return Expr::constant(cplx(0.0, v));
        }
        return Expr::constant(cplx(v, 0.0));
    }

    Expr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (name == "z") return Expr::var();
        if (name == "i") return Expr::constant(cplx(0.0, 1.0));
        if (name == "exp" || name == "log" || name == "sqrt") {
            if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
            Expr arg = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            Expr::Op op = name == "exp" ? Expr::Op::Exp : name == "log" ? Expr::Op::Log : Expr::Op::Sqrt;
            return Expr::node(op, std::move(arg));
        }
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

Expr Expr::parse(const std::string& text) { return Parser(text).run(); }

} // namespace rhmod
