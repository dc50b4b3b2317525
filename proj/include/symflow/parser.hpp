#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>

#include "symflow/expr.hpp"

namespace symflow {

// Names the parser resolves. `x` and `t` are always independent variables
// and `I` is always the imaginary unit.
struct SymbolTable {
    std::set<std::string> dependents;
    std::set<std::string> parameters;

    // u, v, phi, psi, f, m1..m8 and alpha, beta, lambda, epsilon, c1..c6.
    static SymbolTable standard();

    bool is_dependent(const std::string& n) const { return dependents.count(n) > 0; }
    bool is_parameter(const std::string& n) const { return parameters.count(n) > 0; }
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          exponent must reduce to an integer
//   primary := integer | 'I' | identifier | '(' expr ')'
//            | 'Diff(' name (',' var)+ ')' | 'Exp(' expr ')'
Expr parse(std::string_view text, const SymbolTable& symbols = SymbolTable::standard());

// Parses a jet coordinate written as `name` or `Diff(name, var, ...)`.
JetCoordinate parse_jet(std::string_view text, const SymbolTable& symbols = SymbolTable::standard());

}  // namespace symflow
