#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "symflow/expr.hpp"
#include "symflow/parser.hpp"

namespace symflow {

struct Equation {
    std::string label;
    Expr expr;  // F = 0
};

// Leading derivative isolated from equation `source`.
struct SolvedForm {
    JetCoordinate lhs;
    Expr rhs;
    std::string source;
};

struct DependentDecl {
    std::string name;
    int max_order = 0;
};

class PdeSystem {
public:
    std::string name;
    std::vector<Direction> independents{Direction::t, Direction::x};
    std::vector<DependentDecl> dependents;
    std::vector<std::string> parameters;
    std::vector<Equation> equations;
    std::vector<SolvedForm> solved;

    bool has_dependent(const std::string& n) const;
    std::vector<std::string> dependent_names() const;
    const Equation& equation(const std::string& label) const;
    std::vector<std::string> equation_labels() const;
    SymbolTable symbols() const;

    // Throws if a solved-form right-hand side contains an eliminable jet.
    void validate() const;
};

// Lax pair entries and the f_t flux, in the built-in parameter names.
Expr lax_a();
Expr lax_b();
Expr lax_c();
Expr f_t_rhs();

PdeSystem builtin_hirota();
// Hirota equations plus the spatial and temporal Lax equations for phi, psi.
PdeSystem builtin_hirota_lax();
// builtin_hirota_lax plus the auxiliary potential f.
PdeSystem builtin_prolonged();
std::vector<PdeSystem> builtin_corpus();
std::optional<PdeSystem> builtin_system(const std::string& name);

class ClosureRangeError : public Error {
public:
    using Error::Error;
};

// Solved forms together with all their prolongations, generated on demand.
// A jet is eliminable when it extends some rule key; among applicable keys
// the one with the most x-derivatives is used.
class Closure {
public:
    static constexpr int default_max_order = 6;

    explicit Closure(std::vector<SolvedForm> rules, int max_order = default_max_order);
    explicit Closure(const PdeSystem& sys, int max_order = default_max_order);

    int max_order() const { return max_order_; }
    const std::vector<SolvedForm>& rules() const { return rules_; }
    Closure with_max_order(int max_order) const { return Closure(rules_, max_order); }

    bool is_eliminable(const JetCoordinate& jet) const;
    // Fully reduced value of an eliminable jet (the jet itself otherwise).
    Expr reduced(const JetCoordinate& jet) const;
    Expr reduce(const Expr& e) const;

private:
    const SolvedForm* rule_for(const JetCoordinate& jet) const;
    Expr reduced_impl(const JetCoordinate& jet, int depth) const;
    Expr reduce_impl(const Expr& e, int depth) const;

    std::vector<SolvedForm> rules_;
    int max_order_;
    struct Memo {
        std::mutex mu;
        std::map<JetCoordinate, Expr> values;
    };
    std::shared_ptr<Memo> memo_;
};

Expr on_shell_reduce(const Expr& e, const PdeSystem& sys, int max_order = Closure::default_max_order);

// Numeric point on the solution manifold. Parameters, x, t and free jets get
// deterministic pseudo-random values from (seed, atom); eliminable jets are
// evaluated from their reduced forms.
class ConsistentPoint {
public:
    ConsistentPoint(std::shared_ptr<const Closure> closure, std::uint64_t seed);

    std::complex<double> value(const Atom& a) const;
    std::complex<double> eval(const Expr& e) const;
    AtomValueFn as_function() const;
    // Fix a value explicitly (e.g. real parameters).
    void set(const Atom& a, std::complex<double> v);
    // Values of all parameters of sys and of every jet up to max_order.
    Assignment materialize(const PdeSystem& sys, int max_order) const;

private:
    std::shared_ptr<const Closure> closure_;
    std::uint64_t seed_;
    std::map<Atom, std::complex<double>> fixed_;
    mutable std::map<Atom, std::complex<double>> cache_;
};

ConsistentPoint consistent_point(const PdeSystem& sys, std::uint64_t seed, int max_order = Closure::default_max_order);

// Line-oriented manifest with sections [independents], [dependents],
// [parameters], [equations], [solved] and optionally [symmetry].
struct Manifest {
    PdeSystem system;
    std::vector<std::pair<std::string, Expr>> symmetry;  // sigma_<name> = expr
};

class ManifestError : public Error {
public:
    ManifestError(const std::string& message, int line)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

Manifest parse_manifest(const std::string& text);
std::string emit_manifest(const PdeSystem& sys);

}  // namespace symflow
