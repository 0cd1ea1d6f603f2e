#include "tunnel/expression.hpp"

#include "tunnel/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace tunnel {

struct Expression::Node {
    enum class Kind { Number, VarX, VarXi, Add, Sub, Mul, Div, Pow, Neg, Func };
    Kind kind = Kind::Number;
    double value = 0.0;
    double (*func)(double) = nullptr;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(double x, double xi) const {
        switch (kind) {
        case Kind::Number: return value;
        case Kind::VarX: return x;
        case Kind::VarXi: return xi;
        case Kind::Add: return args[0]->eval(x, xi) + args[1]->eval(x, xi);
        case Kind::Sub: return args[0]->eval(x, xi) - args[1]->eval(x, xi);
        case Kind::Mul: return args[0]->eval(x, xi) * args[1]->eval(x, xi);
        case Kind::Div: return args[0]->eval(x, xi) / args[1]->eval(x, xi);
        case Kind::Pow: {
            const double base = args[0]->eval(x, xi);
            const double e = args[1]->eval(x, xi);
            // integer exponents keep negative bases well defined
            if (e == std::round(e) && std::abs(e) < 64) {
                const int n = static_cast<int>(e);
                double r = 1.0;
                for (int i = 0; i < std::abs(n); ++i) r *= base;
                return n >= 0 ? r : 1.0 / r;
            }
            return std::pow(base, e);
        }
        case Kind::Neg: return -args[0]->eval(x, xi);
        case Kind::Func: return func(args[0]->eval(x, xi));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("expression '" + s_ + "': " + msg + " at position " +
                          std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Kind::Add, {lhs, term()});
            else if (accept('-')) lhs = make(Kind::Sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Kind::Mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Kind::Div, {lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Kind::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Kind::Pow, {base, unary()});
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            auto n = std::make_shared<Expression::Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string id = s_.substr(start, pos_ - start);
            if (id == "x") return make(Kind::VarX);
            if (id == "xi") return make(Kind::VarXi);
            if (id == "pi") {
                auto n = std::make_shared<Expression::Node>();
                n->value = std::numbers::pi;
                return n;
            }
            double (*f)(double) = nullptr;
            if (id == "sqrt") f = [](double v) { return std::sqrt(v); };
            else if (id == "exp") f = [](double v) { return std::exp(v); };
            else if (id == "cos") f = [](double v) { return std::cos(v); };
            else if (id == "sin") f = [](double v) { return std::sin(v); };
            else if (id == "cosh") f = [](double v) { return std::cosh(v); };
            else if (id == "sinh") f = [](double v) { return std::sinh(v); };
            else if (id == "tanh") f = [](double v) { return std::tanh(v); };
            else if (id == "abs") f = [](double v) { return std::abs(v); };
            else throw IdentifierError("expression '" + s_ + "': unknown identifier '" + id + "'");
            if (!accept('(')) fail("expected '(' after " + id);
            NodePtr arg = expr();
            if (!accept(')')) fail("missing ')'");
            auto n = std::make_shared<Expression::Node>();
            n->kind = Kind::Func;
            n->func = f;
            n->args = {arg};
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    e.root_ = Parser(text).parse();
    return e;
}

double Expression::operator()(double x, double xi) const {
    return root_->eval(x, xi);
}

}  // namespace tunnel
