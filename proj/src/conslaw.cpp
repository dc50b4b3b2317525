#include "symflow/conslaw.hpp"

#include <cmath>

namespace symflow {

Expr euler_lagrange(const Expr& L, const std::string& wrt) {
    std::vector<Expr> parts;
    for (const auto& j : jet_coordinates(L)) {
        if (j.name != wrt) continue;
        Expr d = total_derivative(diff(L, Atom::jet(j)), j.index);
        parts.push_back(j.index.order() % 2 ? -d : d);
    }
    return sum(parts);
}

std::vector<std::string> multiplier_names() {
    std::vector<std::string> out;
    for (int i = 1; i <= 8; ++i) out.push_back("m" + std::to_string(i));
    return out;
}

void FormalLagrangian::validate() const {
    std::set<std::string> mult(multipliers.begin(), multipliers.end());
    for (const auto& j : jet_coordinates(expr))
        if (!mult.count(j.name) && j.index.t > 0 && j.index.x > 0)
            throw Error("formal Lagrangian contains the mixed derivative " + to_string(j));
    for (const auto& t : expr.terms()) {
        int degree = 0;
        for (const auto& f : t.mono.factors())
            if (f.atom.kind() == AtomKind::Jet && mult.count(f.atom.name())) degree += f.exponent;
        if (degree != 1) throw Error("formal Lagrangian term is not linear in the multipliers");
    }
}

FormalLagrangian formal_lagrangian(const PdeSystem& sys) {
    FormalLagrangian L;
    L.system = sys;
    std::vector<Expr> parts;
    for (std::size_t i = 0; i < sys.equations.size(); ++i) {
        std::string m = "m" + std::to_string(i + 1);
        if (sys.has_dependent(m)) throw Error("multiplier " + m + " clashes with a dependent");
        L.multipliers.push_back(m);
        parts.push_back(Expr::jet(m) * sys.equations[i].expr);
    }
    L.expr = sum(parts);
    L.validate();
    return L;
}

FormalLagrangian formal_lagrangian() { return formal_lagrangian(builtin_prolonged()); }

namespace {

struct Target {
    const char* dependent;
    const char* multiplier;
    DerivIndex index;
};

constexpr Target isolation_targets[] = {
    {"u", "m1", {1, 0}}, {"v", "m2", {1, 0}}, {"phi", "m3", {0, 1}}, {"psi", "m4", {0, 1}}, {"f", "m7", {0, 1}},
};

SolvedForm isolate(const Expr& e, const JetCoordinate& target, const std::string& label) {
    Atom a = Atom::jet(target);
    Expr coeff = diff(e, a);
    auto c = coeff.constant_value();
    if (!c || c->is_zero())
        throw IsolationError("coefficient of " + to_string(target) + " in " + label + " is not a nonzero constant");
    Expr rest = e - coeff * Expr(a);
    return {target, rest.scaled(-c->inverse()), label};
}

}  // namespace

AdjointSystem adjoint_system(const FormalLagrangian& L, int max_order) {
    AdjointSystem adj;
    Closure system(L.system, max_order);
    for (const auto& t : isolation_targets) {
        if (!L.system.has_dependent(t.dependent)) continue;
        std::string label = std::string("E_") + t.dependent;
        Expr e = euler_lagrange(L.expr, t.dependent);
        adj.labels.push_back(label);
        adj.equations.push_back(e);
        SolvedForm s = isolate(e, {t.multiplier, t.index}, label);
        s.rhs = system.reduce(s.rhs);
        adj.solved.push_back(std::move(s));
    }
    std::vector<SolvedForm> rules = L.system.solved;
    rules.insert(rules.end(), adj.solved.begin(), adj.solved.end());
    Closure combined(rules, max_order);
    for (auto& s : adj.solved)
        for (const auto& j : jet_coordinates(s.rhs))
            if (combined.is_eliminable(j)) throw IsolationError(s.source + " still involves the eliminable " + to_string(j));
    adj.combined = std::make_shared<Closure>(std::move(combined));
    return adj;
}

ConservedVector conserved_vector(const VectorField& vf, const FormalLagrangian& L) {
    for (const auto& [k, c] : vf.coeffs)
        for (const auto& j : jet_coordinates(c))
            if (j.index.order() > 0) throw Error("generator coefficient of " + k + " is not a point function");
    std::set<std::string> mult(L.multipliers.begin(), L.multipliers.end());
    for (const auto& j : jet_coordinates(L.expr))
        if (!mult.count(j.name) && (j.index.t > 1 || j.index.x > 3 || (j.index.t > 0 && j.index.x > 0)))
            throw Error("conserved_vector: unsupported jet " + to_string(j) + " in the Lagrangian");
    Expr xt = vf.coefficient("t"), xx = vf.coefficient("x");
    std::vector<Expr> tt{xt * L.expr}, tx{xx * L.expr};
    for (const auto& dep : L.system.dependent_names()) {
        auto d = [&](int t, int x) { return diff(L.expr, Atom::jet(dep, {t, x})); };
        auto Dx = [](const Expr& e) { return total_derivative(e, Direction::x); };
        Expr W = vf.coefficient(dep) - xt * Expr::jet(dep, {1, 0}) - xx * Expr::jet(dep, {0, 1});
        if (W.is_zero()) continue;
        Expr l1 = d(0, 1), l2 = d(0, 2), l3 = d(0, 3);
        Expr Wx = Dx(W);
        tt.push_back(W * d(1, 0));
        tx.push_back(W * (l1 - Dx(l2) + Dx(Dx(l3))));
        tx.push_back(Wx * (l2 - Dx(l3)));
        tx.push_back(Dx(Wx) * l3);
    }
    return {sum(tt), sum(tx), vf, "generator " + to_string(vf)};
}

ConservedVector potential_conserved_vector() {
    return {Expr::jet("f", {0, 1}), -Expr::jet("f", {1, 0}), VectorField{}, "potential pair (f_x, -f_t)"};
}

ConservedVector trivial_conserved_vector(const Expr& H) {
    return {total_derivative(H, Direction::x), -total_derivative(H, Direction::t), VectorField{},
            "trivial pair from " + to_string(H)};
}

DivergenceCheck verify_divergence(const ConservedVector& cv, const AdjointSystem& adj, int numeric_points,
                                  std::uint64_t seed) {
    Expr div = total_derivative(cv.Tt, Direction::t) + total_derivative(cv.Tx, Direction::x);
    std::shared_ptr<const Closure> closure = adj.combined;
    DivergenceCheck out;
    try {
        out.residual = closure->reduce(div);
    } catch (const ClosureRangeError&) {
        closure = std::make_shared<Closure>(closure->with_max_order(closure->max_order() + 2));
        out.residual = closure->reduce(div);
    }
    out.max_order = closure->max_order();
    out.holds = out.residual.is_zero();
    for (int k = 0; k < numeric_points; ++k) {
        ConsistentPoint p(closure, seed * 1000003u + static_cast<std::uint64_t>(k));
        out.numeric_max = std::max(out.numeric_max, std::abs(p.eval(div)));
    }
    return out;
}

std::string assess_triviality(const ConservedVector& cv, const AdjointSystem& adj) {
    if (adj.combined->reduce(cv.Tt).is_zero() && adj.combined->reduce(cv.Tx).is_zero()) return "vanishes on-shell";
    return "not assessed";
}

}  // namespace symflow
