#include "doctest.h"

#include "symflow/linsym.hpp"
#include "test_support.hpp"

using namespace symflow;

namespace {

Expr P(const char* s) { return parse(s); }

SymmetryCandidate sig(std::map<std::string, Expr> c) { return SymmetryCandidate{std::move(c)}; }

const std::vector<std::string> hirota_eqs{"F1", "F2"};

}  // namespace

TEST_CASE("frechet examples") {
    PdeSystem h = builtin_hirota();
    auto dx = frechet(h, sig({{"u", P("Diff(u,x)")}, {"v", P("Diff(v,x)")}}));
    CHECK(dx[0] == total_derivative(h.equation("F1").expr, Direction::x));
    CHECK(dx[1] == total_derivative(h.equation("F2").expr, Direction::x));
    auto z = frechet(h, sig({{"u", Expr()}, {"v", Expr()}}));
    CHECK(z[0].is_zero());
    CHECK(z[1].is_zero());
    CHECK_THROWS_AS(frechet(h, sig({{"u", P("u")}})), ComponentMismatch);
    CHECK_THROWS_AS(frechet(h, sig({{"u", P("u")}, {"v", P("v")}, {"phi", P("phi")}})), ComponentMismatch);
}

TEST_CASE("frechet reproduces the hand linearization") {
    // The printed first line equals -i times the linearization of F1.
    PdeSystem h = builtin_hirota();
    auto lin = frechet(h, sig({{"u", P("u")}, {"v", P("v")}}));
    PdeSystem sym = h;
    sym.dependents.push_back({"m1", 3});
    sym.dependents.push_back({"m2", 3});
    auto s1 = Expr::jet("m1"), s2 = Expr::jet("m2");
    auto D = [](const Expr& e, int t, int x) { return total_derivative(e, DerivIndex{t, x}); };
    Expr printed1 = D(s1, 1, 0) - P("alpha*I") * D(s1, 0, 2) + P("4*I*alpha*u*v") * s1 + P("2*I*alpha*u^2") * s2 +
                    P("beta") * D(s1, 0, 3) - P("6*beta*v*Diff(u,x)") * s1 - P("6*beta*u*Diff(u,x)") * s2 -
                    P("6*beta*u*v") * D(s1, 0, 1);
    Expr printed2 = D(s2, 1, 0) + P("alpha*I") * D(s2, 0, 2) - P("4*I*alpha*u*v") * s2 - P("2*I*alpha*v^2") * s1 +
                    P("beta") * D(s2, 0, 3) - P("6*beta*u*Diff(v,x)") * s2 - P("6*beta*u*v") * D(s2, 0, 1) -
                    P("6*beta*v*Diff(v,x)") * s1;
    auto l = frechet(sym, sig({{"u", s1}, {"v", s2}, {"m1", Expr()}, {"m2", Expr()}}), hirota_eqs);
    CHECK(l[0] == P("I") * printed1);
    CHECK(l[1] == P("I") * printed2);
}

TEST_CASE("frechet is linear") {
    PdeSystem p = builtin_prolonged();
    auto a = sig({{"u", P("phi^2")}, {"v", P("u*v")}, {"phi", P("f")}, {"psi", P("Diff(u,x)")}, {"f", P("x*u")}});
    auto b = sig({{"u", P("Diff(v,x,x)")}, {"v", P("t")}, {"phi", P("psi*f")}, {"psi", P("1")}, {"f", P("f^2")}});
    Expr c = P("3/2*alpha");
    auto lhs = frechet(p, c * a + b);
    auto fa = frechet(p, a), fb = frechet(p, b);
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == c * fa[i] + fb[i]);
}

TEST_CASE("nonlocal symmetry and its localization") {
    PdeSystem p = builtin_prolonged();
    auto r = verify_symmetry(p, sig({{"u", P("phi^2")}, {"v", P("psi^2")}}), hirota_eqs);
    CHECK(r.holds);
    auto loc = sig({{"u", P("phi^2")}, {"v", P("psi^2")}, {"phi", P("phi*f")}, {"psi", P("psi*f")}, {"f", P("f^2")}});
    auto all = verify_symmetry(p, loc);
    CHECK(all.holds);
    CHECK(all.residuals.size() == 8);
    auto bad = verify_symmetry(builtin_hirota(), sig({{"u", P("u")}, {"v", P("v")}}));
    CHECK_FALSE(bad.holds);
    auto scaling = verify_symmetry(builtin_hirota(), sig({{"u", P("u")}, {"v", P("-v")}}));
    CHECK(scaling.holds);
}

TEST_CASE("evolutionary form") {
    PdeSystem p = builtin_prolonged();
    VectorField dx;
    dx.set("x", Expr(1));
    auto s = evolutionary_from_point(dx, p);
    for (const auto& d : p.dependent_names()) CHECK(s.component(d) == Expr::jet(d, {0, 1}));
    VectorField v1;
    v1.set("u", P("phi^2")).set("v", P("psi^2")).set("phi", P("phi*f")).set("psi", P("psi*f")).set("f", P("f^2"));
    auto s1 = evolutionary_from_point(v1, p);
    CHECK(s1.component("u") == P("-phi^2"));
    CHECK(s1.component("f") == P("-f^2"));
    CHECK(verify_symmetry(p, s1).holds);
    VectorField sc;
    sc.set("u", P("u")).set("v", P("-v"));
    auto s2 = evolutionary_from_point(sc, builtin_hirota());
    CHECK(s2.component("u") == P("-u"));
    CHECK(s2.component("v") == P("v"));
}

TEST_CASE("translations verify on every built-in system") {
    for (const auto& sys : builtin_corpus()) {
        for (const char* dir : {"x", "t"}) {
            VectorField v;
            v.set(dir, Expr(1));
            CAPTURE(sys.name);
            CAPTURE(dir);
            CHECK(verify_symmetry(sys, evolutionary_from_point(v, sys)).holds);
        }
    }
}

TEST_CASE("symmetry families") {
    PdeSystem hl = builtin_hirota_lax();
    PdeSystem p = builtin_prolonged();
    CHECK(verify_family(hl, hirota_family(), hirota_eqs));
    CHECK(verify_family(p, prolonged_family()));
    CHECK_FALSE(verify_family(p, prolonged_family_flipped_psi()));

    VectorField mutated = hirota_family();
    mutated.set("u", P("2*I*alpha*c1*u*x/(9*beta) + c5*u + c4*phi^2"));
    CHECK_FALSE(verify_family(hl, mutated, hirota_eqs));
    VectorField mutated2 = prolonged_family();
    mutated2.set("f", P("c2*f^2 + 2*c5*f + c6"));
    CHECK_FALSE(verify_family(p, mutated2));
}

TEST_CASE("on-shell equivalent characteristics") {
    PdeSystem p = builtin_prolonged();
    auto a = sig({{"u", P("Diff(u,t)")}, {"v", P("Diff(v,t)")}, {"phi", P("Diff(phi,t)")}, {"psi", P("Diff(psi,t)")}, {"f", P("Diff(f,t)")}});
    Closure c(p);
    SymmetryCandidate b;
    for (const auto& [k, v] : a.components) b.components[k] = c.reduce(v);
    CHECK(verify_symmetry(p, a).holds);
    CHECK(verify_symmetry(p, b).holds);
}

TEST_CASE("determining equations for the Hirota system") {
    PdeSystem hl = builtin_hirota_lax();
    Ansatz a;
    std::vector<std::string> vars{"x", "t", "u", "v", "phi", "psi"};
    a.unknowns = {{"X", "x", vars}, {"T", "t", vars}, {"U", "u", vars}, {"V", "v", vars}};
    a.degree = 2;
    auto ds = generate_determining(hl, a, hirota_eqs);
    CHECK(ds.constraints.size() > 10);
    // Linear and homogeneous in the ansatz coefficients.
    std::set<Atom> ks(ds.coefficients.begin(), ds.coefficients.end());
    for (const auto& c : ds.constraints)
        for (const auto& t : c.expr.terms()) {
            int deg = 0;
            for (const auto& f : t.mono.factors())
                if (ks.count(f.atom)) deg += f.exponent;
            CHECK(deg == 1);
        }
    // Splitting is sound: the constraints reassemble the residual.
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        std::vector<Expr> parts;
        for (const auto& c : ds.constraints)
            if (c.equation == ds.labels[i]) parts.push_back(monomial_expr(c.key) * c.expr);
        CHECK(sum(parts) == ds.residuals[i]);
    }
    CHECK(ds.satisfied_by(hirota_family()));
    CHECK(ds.satisfied_by(VectorField{}));
    VectorField mutated = hirota_family();
    mutated.set("u", P("2*I*alpha*c1*u*x/(9*beta) + c5*u + c4*phi^2"));
    CHECK_FALSE(ds.satisfied_by(mutated));
    VectorField cubic;
    cubic.set("u", P("u^3"));
    CHECK_THROWS_AS(ds.coordinates_of(cubic), Error);

    Ansatz bad = a;
    bad.unknowns[0].variables.push_back("w");
    CHECK_THROWS_AS(generate_determining(hl, bad, hirota_eqs), Error);
}

TEST_CASE("determining equations for the prolonged system") {
    PdeSystem p = builtin_prolonged();
    auto ds = generate_determining(p, Ansatz::point(p, 2));
    CHECK(ds.coefficients.size() == 7 * 36);
    CHECK(ds.satisfied_by(prolonged_family()));
    CHECK_FALSE(ds.satisfied_by(prolonged_family_flipped_psi()));
}
