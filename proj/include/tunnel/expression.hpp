#pragma once

#include <memory>
#include <string>

namespace tunnel {

// Tiny arithmetic language for user-defined symbols in config files.
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('+'|'-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 'xi' | 'pi' | func '(' expr ')' | '(' expr ')'
//
// func is one of sqrt exp cos sin cosh sinh tanh abs. Parse errors raise
// IdentifierError (unknown names) or ConfigError (syntax).
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text);

    double operator()(double x, double xi) const;
    const std::string& text() const noexcept { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace tunnel
