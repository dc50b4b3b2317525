#include "symflow/linsym.hpp"

#include <algorithm>
#include <future>
#include <set>

namespace symflow {

Expr SymmetryCandidate::component(const std::string& dep) const {
    auto it = components.find(dep);
    return it == components.end() ? Expr() : it->second;
}

SymmetryCandidate operator+(const SymmetryCandidate& a, const SymmetryCandidate& b) {
    SymmetryCandidate out = a;
    for (const auto& [k, v] : b.components) out.components[k] = a.component(k) + v;
    return out;
}

SymmetryCandidate operator*(const Expr& s, const SymmetryCandidate& a) {
    SymmetryCandidate out;
    for (const auto& [k, v] : a.components) out.components[k] = s * v;
    return out;
}

namespace {

std::vector<const Equation*> select(const PdeSystem& sys, const std::vector<std::string>& labels) {
    std::vector<const Equation*> out;
    if (labels.empty()) {
        for (const auto& e : sys.equations) out.push_back(&e);
    } else {
        for (const auto& l : labels) out.push_back(&sys.equation(l));
    }
    return out;
}

void check_components(const PdeSystem& sys, const SymmetryCandidate& sigma, const std::vector<const Equation*>& eqs) {
    for (const auto& [k, v] : sigma.components)
        if (!sys.has_dependent(k)) throw ComponentMismatch("component for unknown dependent " + k);
    for (const auto* e : eqs)
        for (const auto& j : jet_coordinates(e->expr))
            if (sys.has_dependent(j.name) && !sigma.components.count(j.name))
                throw ComponentMismatch("equation " + e->label + " involves " + j.name + " but sigma has no such component");
}

// D_J(sigma_dep), memoized along the derivative lattice.
class ProlongedSigma {
public:
    explicit ProlongedSigma(const SymmetryCandidate& s) : sigma_(s) {}

    const Expr& get(const std::string& dep, const DerivIndex& idx) {
        auto key = std::make_pair(dep, std::make_pair(idx.t, idx.x));
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        Expr value;
        if (idx.order() == 0) value = sigma_.component(dep);
        else if (idx.x > 0) value = total_derivative(get(dep, {idx.t, idx.x - 1}), Direction::x);
        else value = total_derivative(get(dep, {idx.t - 1, idx.x}), Direction::t);
        return cache_.emplace(key, std::move(value)).first->second;
    }

private:
    const SymmetryCandidate& sigma_;
    std::map<std::pair<std::string, std::pair<int, int>>, Expr> cache_;
};

Expr frechet_one(const PdeSystem& sys, const Equation& eq, const SymmetryCandidate& sigma) {
    ProlongedSigma pro(sigma);
    std::vector<Expr> parts;
    for (const auto& j : jet_coordinates(eq.expr)) {
        if (!sys.has_dependent(j.name)) continue;
        Expr d = diff(eq.expr, Atom::jet(j));
        if (d.is_zero()) continue;
        parts.push_back(d * pro.get(j.name, j.index));
    }
    return sum(parts);
}

}  // namespace

std::vector<Expr> frechet(const PdeSystem& sys, const SymmetryCandidate& sigma, const std::vector<std::string>& labels) {
    auto eqs = select(sys, labels);
    check_components(sys, sigma, eqs);
    std::vector<Expr> out;
    for (const auto* e : eqs) out.push_back(frechet_one(sys, *e, sigma));
    return out;
}

SymmetryCheck verify_symmetry(const PdeSystem& sys, const SymmetryCandidate& sigma, const std::vector<std::string>& labels) {
    return verify_symmetry(sys, Closure(sys), sigma, labels);
}

SymmetryCheck verify_symmetry(const PdeSystem& sys, const Closure& closure, const SymmetryCandidate& sigma,
                              const std::vector<std::string>& labels) {
    auto eqs = select(sys, labels);
    check_components(sys, sigma, eqs);
    // On-shell equivalent characteristics give on-shell equal linearizations,
    // so sigma is reduced first to keep the prolongations small.
    SymmetryCandidate reduced;
    for (const auto& [k, v] : sigma.components) reduced.components[k] = closure.reduce(v);
    std::vector<std::future<Expr>> jobs;
    for (const auto* e : eqs)
        jobs.push_back(std::async(std::launch::async,
                                  [&, e] { return closure.reduce(frechet_one(sys, *e, reduced)); }));
    SymmetryCheck out;
    out.holds = true;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        out.labels.push_back(eqs[i]->label);
        out.residuals.push_back(jobs[i].get());
        out.holds = out.holds && out.residuals.back().is_zero();
    }
    return out;
}

SymmetryCandidate evolutionary_from_point(const VectorField& vf, const PdeSystem& sys) {
    for (const auto& [k, v] : vf.coeffs)
        if (k != "x" && k != "t" && !sys.has_dependent(k)) throw ComponentMismatch("vector field moves unknown coordinate " + k);
    SymmetryCandidate s;
    Expr xi_x = vf.coefficient("x"), xi_t = vf.coefficient("t");
    for (const auto& d : sys.dependents)
        s.components[d.name] = xi_x * Expr::jet(d.name, {0, 1}) + xi_t * Expr::jet(d.name, {1, 0}) - vf.coefficient(d.name);
    return s;
}

VectorField hirota_family() {
    VectorField v;
    v.set("x", parse("c1*x/3 + 2*alpha^2*c1*t/(9*beta) + c3"));
    v.set("t", parse("c1*t + c2"));
    v.set("u", parse("I*alpha*c1*u*x/(9*beta) + c5*u + c4*phi^2"));
    v.set("v", parse("(((-6*c1 - 9*c5)*v + 9*c4*psi^2)*beta - I*alpha*v*c1*x)/(9*beta)"));
    return v;
}

VectorField prolonged_family() {
    VectorField v;
    v.set("x", parse("c4"));
    v.set("t", parse("c3"));
    v.set("u", parse("c2*phi^2 + c1*u"));
    v.set("v", parse("c2*psi^2 - c1*v"));
    v.set("phi", parse("(2*c2*f + c1 + c5)*phi/2"));
    v.set("psi", parse("(2*c2*f - c1 + c5)*psi/2"));
    v.set("f", parse("c2*f^2 + c5*f + c6"));
    return v;
}

VectorField prolonged_family_flipped_psi() {
    VectorField v = prolonged_family();
    v.set("psi", parse("(-2*c2*f + c1 - c5)*psi/2"));
    return v;
}

bool verify_family(const PdeSystem& sys, const VectorField& family, const std::vector<std::string>& labels) {
    SymmetryCandidate s = evolutionary_from_point(family, sys);
    if (!labels.empty()) {
        // Only the dependents occurring in the selected equations.
        std::set<std::string> used;
        for (const auto& l : labels)
            for (const auto& j : jet_coordinates(sys.equation(l).expr))
                if (sys.has_dependent(j.name)) used.insert(j.name);
        for (auto it = s.components.begin(); it != s.components.end();)
            it = used.count(it->first) ? std::next(it) : s.components.erase(it);
    }
    return verify_symmetry(sys, s, labels).holds;
}

// ---- Determining equations -----------------------------------------------------

Ansatz Ansatz::point(const PdeSystem& sys, int degree) {
    static const std::map<std::string, std::string> names{{"x", "X"}, {"t", "T"}, {"u", "U"},  {"v", "V"},
                                                          {"phi", "P"}, {"psi", "Q"}, {"f", "F"}};
    std::vector<std::string> vars{"x", "t"};
    for (const auto& d : sys.dependents) vars.push_back(d.name);
    Ansatz a;
    a.degree = degree;
    for (const auto& coord : vars) {
        auto it = names.find(coord);
        a.unknowns.push_back({it == names.end() ? "E" + coord : it->second, coord, vars});
    }
    return a;
}

namespace {

// All monomials of total degree <= d in the given variables.
std::vector<Expr> monomials_upto(const std::vector<std::string>& vars, int d) {
    std::vector<Expr> out{Expr(1)};
    std::vector<std::pair<Expr, std::size_t>> frontier{{Expr(1), 0}};
    for (int deg = 1; deg <= d; ++deg) {
        std::vector<std::pair<Expr, std::size_t>> next;
        for (const auto& [m, start] : frontier)
            for (std::size_t i = start; i < vars.size(); ++i) {
                Expr nm = m * Expr(coordinate_atom(vars[i]));
                out.push_back(nm);
                next.emplace_back(nm, i);
            }
        frontier = std::move(next);
    }
    return out;
}

bool is_split_atom(const Atom& a) { return a.kind() == AtomKind::Independent || a.kind() == AtomKind::Jet; }

}  // namespace

DeterminingSystem generate_determining(const PdeSystem& sys, const Ansatz& ansatz, const std::vector<std::string>& labels) {
    DeterminingSystem ds;
    for (const auto& u : ansatz.unknowns) {
        if (u.coordinate != "x" && u.coordinate != "t" && !sys.has_dependent(u.coordinate))
            throw Error("ansatz unknown " + u.name + " moves undeclared coordinate " + u.coordinate);
        for (const auto& v : u.variables)
            if (v != "x" && v != "t" && !sys.has_dependent(v))
                throw Error("ansatz unknown " + u.name + " depends on undeclared variable " + v);
        ds.unknowns.push_back(u.name);
        std::vector<Expr> parts;
        int n = 0;
        for (const auto& m : monomials_upto(u.variables, ansatz.degree)) {
            Atom k = Atom::parameter("k" + u.name + std::to_string(n++));
            ds.coefficients.push_back(k);
            parts.push_back(Expr(k) * m);
        }
        ds.field.set(u.coordinate, sum(parts));
    }
    Closure closure(sys);
    SymmetryCandidate sigma = evolutionary_from_point(ds.field, sys);
    auto eqs = select(sys, labels);
    for (auto it = sigma.components.begin(); it != sigma.components.end();) {
        bool used = false;
        for (const auto* e : eqs)
            for (const auto& j : jet_coordinates(e->expr)) used = used || j.name == it->first;
        it = used ? std::next(it) : sigma.components.erase(it);
    }
    for (auto& [k, v] : sigma.components) v = closure.reduce(v);
    std::vector<std::future<Expr>> jobs;
    for (const auto* e : eqs)
        jobs.push_back(std::async(std::launch::async, [&, e] { return closure.reduce(frechet_one(sys, *e, sigma)); }));
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        ds.labels.push_back(eqs[i]->label);
        ds.residuals.push_back(jobs[i].get());
        for (auto& [key, rest] : split_by(ds.residuals.back(), is_split_atom))
            ds.constraints.push_back({eqs[i]->label, key, rest});
    }
    return ds;
}

std::map<Atom, Expr> DeterminingSystem::coordinates_of(const VectorField& vf) const {
    std::map<Atom, Expr> out;
    for (const auto& k : coefficients) out[k] = Expr();
    for (const auto& [coord, c] : vf.coeffs) {
        Expr generic = field.coefficient(coord);
        if (generic.is_zero()) throw Error("vector field moves " + coord + " which the ansatz does not");
        // Ansatz monomial -> coefficient atom.
        std::map<Monomial, Atom> slot;
        for (auto& [key, rest] : split_by(generic, is_split_atom)) slot.emplace(key, rest.terms().front().mono.factors().front().atom);
        for (auto& [key, rest] : split_by(c, is_split_atom)) {
            auto it = slot.find(key);
            if (it == slot.end()) throw Error("coefficient of " + coord + " lies outside the ansatz: " + to_string(monomial_expr(key)));
            out[it->second] = rest;
        }
    }
    return out;
}

std::vector<Expr> DeterminingSystem::evaluate(const VectorField& vf) const {
    auto coords = coordinates_of(vf);
    SubstitutionRules rules(coords.begin(), coords.end());
    std::vector<Expr> out;
    for (const auto& c : constraints) out.push_back(substitute(c.expr, rules));
    return out;
}

bool DeterminingSystem::satisfied_by(const VectorField& vf) const {
    for (const auto& e : evaluate(vf))
        if (!e.is_zero()) return false;
    return true;
}

}  // namespace symflow
