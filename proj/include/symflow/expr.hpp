#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "symflow/coefficient.hpp"

namespace symflow {

class Expr;
struct ExprRep;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Independent variables of the jet space.
enum class Direction : std::uint8_t { t, x };

const char* direction_name(Direction d);

// Sorted multiset over {t, x}; mixed partials are identified.
struct DerivIndex {
    int t = 0;
    int x = 0;

    int order() const { return t + x; }
    DerivIndex bumped(Direction d, int n = 1) const {
        return d == Direction::t ? DerivIndex{t + n, x} : DerivIndex{t, x + n};
    }
    int count(Direction d) const { return d == Direction::t ? t : x; }
    bool dominates(const DerivIndex& o) const { return t >= o.t && x >= o.x; }
    DerivIndex minus(const DerivIndex& o) const { return {t - o.t, x - o.x}; }

    friend bool operator==(const DerivIndex&, const DerivIndex&) = default;
    // Order by total order, then lexicographically on the sorted multiset
    // (t sorts before x, so more t's compare smaller).
    friend std::strong_ordering operator<=>(const DerivIndex& a, const DerivIndex& b) {
        if (auto c = a.order() <=> b.order(); c != 0) return c;
        return b.t <=> a.t;
    }
};

struct JetCoordinate {
    std::string name;
    DerivIndex index;

    friend bool operator==(const JetCoordinate&, const JetCoordinate&) = default;
    friend std::strong_ordering operator<=>(const JetCoordinate& a, const JetCoordinate& b) {
        if (auto c = a.name <=> b.name; c != 0) return c;
        return a.index <=> b.index;
    }
    JetCoordinate bumped(Direction d, int n = 1) const { return {name, index.bumped(d, n)}; }
};

// Printable form, e.g. "u" or "Diff(u,x,x,t)".
std::string to_string(const JetCoordinate& jet);

// Atom kinds in canonical ordering rank.
enum class AtomKind : std::uint8_t { Parameter, Independent, Jet, Exp, Reciprocal };

// A multiplicative generator of a monomial. Exp and Reciprocal carry a
// canonical argument; Reciprocal(P)^k stands for P^(-k) with P a
// reciprocal-free polynomial of at least two terms.
class Atom {
public:
    static Atom parameter(std::string name);
    static Atom independent(Direction d);
    static Atom jet(JetCoordinate jet);
    static Atom jet(std::string name, DerivIndex index = {}) { return jet(JetCoordinate{std::move(name), index}); }

    AtomKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const DerivIndex& index() const { return index_; }
    JetCoordinate jet_coordinate() const { return {name_, index_}; }
    Direction direction() const { return name_ == "t" ? Direction::t : Direction::x; }
    Expr argument() const;

    bool is_simple() const { return kind_ <= AtomKind::Jet; }

    friend bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }
    friend bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }
    static int compare(const Atom& a, const Atom& b);

private:
    friend class Expr;
    friend struct AtomAccess;
    AtomKind kind_ = AtomKind::Parameter;
    std::string name_;
    DerivIndex index_;
    std::shared_ptr<const ExprRep> arg_;
};

struct Factor {
    Atom atom;
    int exponent = 1;
};

// Sorted product of atom powers; no zero exponents, at most one Exp factor.
class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::vector<Factor> sorted_factors) : factors_(std::move(sorted_factors)) {}

    const std::vector<Factor>& factors() const { return factors_; }
    bool empty() const { return factors_.empty(); }
    int degree_of(const Atom& a) const;
    int total_degree() const;

    static int compare(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) { return compare(a, b) == 0; }
    friend bool operator<(const Monomial& a, const Monomial& b) { return compare(a, b) < 0; }

private:
    std::vector<Factor> factors_;
};

struct Term {
    Coefficient coeff;
    Monomial mono;
};

// Immutable symbolic expression held in canonical form: a sorted sum of
// monomials with exact complex-rational coefficients.
class Expr {
public:
    Expr();
    Expr(long value);
    Expr(int value) : Expr(static_cast<long>(value)) {}
    Expr(const Coefficient& c);
    explicit Expr(const Atom& atom);

    static Expr parameter(const std::string& name) { return Expr(Atom::parameter(name)); }
    static Expr independent(Direction d) { return Expr(Atom::independent(d)); }
    static Expr jet(const std::string& name, DerivIndex index = {}) { return Expr(Atom::jet(name, index)); }
    static Expr jet(const JetCoordinate& j) { return Expr(Atom::jet(j)); }
    static Expr imaginary_unit() { return Expr(Coefficient::imaginary_unit()); }
    static Expr rational(long num, long den) { return Expr(Coefficient::rational(num, den)); }
    static Expr from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const;
    std::size_t size() const { return terms().size(); }
    bool is_zero() const { return terms().empty(); }
    bool is_constant() const;
    std::optional<Coefficient> constant_value() const;
    bool has_reciprocal() const;
    bool has_exp() const;

    Expr operator-() const;
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    // Equality of canonical forms. Reciprocal factors are not factored into
    // irreducibles, so rational expressions are compared through the
    // normalized difference.
    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
    // Structural total order (used for map keys).
    static int compare(const Expr& a, const Expr& b);

    Expr scaled(const Coefficient& c) const;

private:
    friend class Atom;
    friend struct AtomAccess;
    explicit Expr(std::shared_ptr<const ExprRep> rep) : rep_(std::move(rep)) {}
    std::shared_ptr<const ExprRep> rep_;
};

Expr pow(const Expr& base, int exponent);
Expr reciprocal(const Expr& e);
Expr exp(const Expr& argument);
Expr sum(const std::vector<Expr>& parts);

// Rebuilds e from its atoms through the arithmetic operations.
Expr canonicalize(const Expr& e);

// Formal partial derivative treating every other atom as a constant.
Expr diff(const Expr& e, const Atom& wrt);
Expr total_derivative(const Expr& e, Direction dir);
Expr total_derivative(const Expr& e, const DerivIndex& index);

using SubstitutionRules = std::map<Atom, Expr>;
// Simultaneous, non-recursive replacement of atoms (also inside Exp and
// reciprocal arguments).
Expr substitute(const Expr& e, const SubstitutionRules& rules);

struct AtomHasher {
    std::size_t operator()(const Atom& a) const;
};

using Assignment = std::map<Atom, std::complex<double>>;
using AtomValueFn = std::function<std::complex<double>(const Atom&)>;

class EvaluationError : public Error {
public:
    using Error::Error;
};

std::complex<double> eval_numeric(const Expr& e, const Assignment& values);
std::complex<double> eval_numeric(const Expr& e, const AtomValueFn& value_of);

// Every atom occurring in e, including inside Exp and reciprocal arguments.
std::set<Atom> atoms(const Expr& e);
std::set<JetCoordinate> jet_coordinates(const Expr& e);
// Largest total derivative order among jets of `name` (-1 if absent).
int max_jet_order(const Expr& e, const std::string& name);

// Splits e = sum_k key_k * rest_k where key_k collects the factors whose atoms
// satisfy `selected`. Keys are returned as monomials.
std::map<Monomial, Expr> split_by(const Expr& e, const std::function<bool(const Atom&)>& selected);

// Coefficients of e as a polynomial in a single atom; fails for negative
// powers or when the atom also occurs inside Exp/reciprocal arguments.
std::map<int, Expr> polynomial_coefficients(const Expr& e, const Atom& var);

Expr monomial_expr(const Monomial& m);

// Deterministic printing in the expression grammar (see parser.hpp).
std::string to_string(const Atom& a);
std::string to_string(const Expr& e);

}  // namespace symflow
