#include "symflow/parser.hpp"

#include <cctype>

namespace symflow {

SymbolTable SymbolTable::standard() {
    SymbolTable s;
    s.dependents = {"u", "v", "phi", "psi", "f"};
    for (int i = 1; i <= 8; ++i) s.dependents.insert("m" + std::to_string(i));
    s.parameters = {"alpha", "beta", "lambda", "epsilon"};
    for (int i = 1; i <= 6; ++i) s.parameters.insert("c" + std::to_string(i));
    return s;
}

namespace {

class Parser {
public:
    Parser(std::string_view text, const SymbolTable& symbols) : text_(text), symbols_(symbols) {}

    Expr parse_all() {
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

    JetCoordinate jet_all() {
        skip_ws();
        std::size_t start = pos_;
        std::string id = identifier();
        JetCoordinate j;
        if (id == "Diff") {
            j = diff_atom(start);
        } else {
            if (!symbols_.is_dependent(id)) fail_at("unknown dependent variable '" + id + "'", start);
            j = {id, {}};
        }
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return j;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const { throw ParseError(msg, at); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    std::string identifier() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected identifier");
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    Expr expr() {
        Expr e = term();
        while (true) {
            if (accept('+')) e = e + term();
            else if (accept('-')) e = e - term();
            else return e;
        }
    }

    Expr term() {
        Expr e = unary();
        while (true) {
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = unary();
                if (d.is_zero()) fail_at("division by zero", at);
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!accept('^')) return base;
        std::size_t at = pos_;
        Expr ex = unary();
        auto c = ex.constant_value();
        if (!c || !c->is_real() || c->re().get_den() != 1) fail_at("exponent must be an integer", at);
        if (!c->re().get_num().fits_sint_p()) fail_at("exponent out of range", at);
        long n = c->re().get_num().get_si();
        if (n < 0 && base.is_zero()) fail_at("zero raised to a negative power", at);
        return symflow::pow(base, static_cast<int>(n));
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            mpz_class n(std::string(text_.substr(start, pos_ - start)));
            return Expr(Coefficient(mpq_class(n), 0));
        }
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        std::size_t start = pos_;
        std::string id = identifier();
        if (id == "I") return Expr::imaginary_unit();
        if (id == "Exp") {
            expect('(');
            Expr arg = expr();
            expect(')');
            return symflow::exp(arg);
        }
        if (id == "Diff") return Expr::jet(diff_atom(start));
        if (id == "x") return Expr::independent(Direction::x);
        if (id == "t") return Expr::independent(Direction::t);
        if (symbols_.is_dependent(id)) return Expr::jet(id);
        if (symbols_.is_parameter(id)) return Expr::parameter(id);
        fail_at("unknown identifier '" + id + "'", start);
    }

    // After the `Diff` keyword.
    JetCoordinate diff_atom(std::size_t start) {
        expect('(');
        std::size_t name_at = pos_;
        std::string name = identifier();
        if (!symbols_.is_dependent(name)) fail_at("unknown dependent variable '" + name + "'", name_at);
        DerivIndex idx;
        int count = 0;
        while (accept(',')) {
            skip_ws();
            std::size_t var_at = pos_;
            std::string var = identifier();
            if (var == "x") ++idx.x;
            else if (var == "t") ++idx.t;
            else fail_at("unknown independent variable " + var, var_at);
            ++count;
        }
        if (count == 0) fail_at("Diff needs at least one independent variable", start);
        expect(')');
        return {name, idx};
    }

    std::string_view text_;
    const SymbolTable& symbols_;
    std::size_t pos_ = 0;
};

std::string power_suffix(int e) {
    if (e == 1) return "";
    if (e > 0) return "^" + std::to_string(e);
    return "^(" + std::to_string(e) + ")";
}

std::string monomial_string(const Monomial& m) {
    std::string out;
    for (const auto& f : m.factors()) {
        if (!out.empty()) out += "*";
        if (f.atom.kind() == AtomKind::Reciprocal) {
            out += "(" + to_string(f.atom.argument()) + ")^(" + std::to_string(-f.exponent) + ")";
            continue;
        }
        out += to_string(f.atom) + power_suffix(f.exponent);
    }
    return out;
}

}  // namespace

Expr parse(std::string_view text, const SymbolTable& symbols) { return Parser(text, symbols).parse_all(); }

JetCoordinate parse_jet(std::string_view text, const SymbolTable& symbols) { return Parser(text, symbols).jet_all(); }

std::string to_string(const JetCoordinate& jet) {
    if (jet.index.order() == 0) return jet.name;
    std::string out = "Diff(" + jet.name;
    for (int i = 0; i < jet.index.x; ++i) out += ",x";
    for (int i = 0; i < jet.index.t; ++i) out += ",t";
    return out + ")";
}

std::string to_string(const Atom& a) {
    switch (a.kind()) {
        case AtomKind::Parameter:
        case AtomKind::Independent: return a.name();
        case AtomKind::Jet: return to_string(a.jet_coordinate());
        case AtomKind::Exp: return "Exp(" + to_string(a.argument()) + ")";
        case AtomKind::Reciprocal: return "(" + to_string(a.argument()) + ")^(-1)";
    }
    return {};
}

std::string to_string(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : e.terms()) {
        std::string piece;
        if (t.mono.empty()) {
            piece = t.coeff.to_string();
        } else if (t.coeff.is_one()) {
            piece = monomial_string(t.mono);
        } else if (t.coeff == Coefficient(-1)) {
            piece = "-" + monomial_string(t.mono);
        } else {
            piece = t.coeff.to_string() + "*" + monomial_string(t.mono);
        }
        if (first) {
            out = piece;
            first = false;
        } else if (piece.front() == '-') {
            out += " - " + piece.substr(1);
        } else {
            out += " + " + piece;
        }
    }
    return out;
}

}  // namespace symflow
