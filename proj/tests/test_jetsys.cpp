#include "doctest.h"

#include <chrono>
#include <random>

#include "symflow/random_expr.hpp"
#include "symflow/jetsys.hpp"
#include "test_support.hpp"

using namespace symflow;

namespace {

Expr P(const char* s) { return parse(s); }

const Closure& prolonged_closure() {
    static const Closure c(builtin_prolonged());
    return c;
}

}  // namespace

TEST_CASE("hirota solved forms") {
    PdeSystem h = builtin_hirota();
    Closure c(h);
    for (const auto& e : h.equations) CHECK(c.reduce(e.expr).is_zero());
    Assignment vac{{Atom::parameter("alpha"), 1.0}, {Atom::parameter("beta"), 0.5}};
    for (const auto& j : {"u", "v"})
        for (int o = 0; o <= 3; ++o)
            for (int t = 0; t <= o; ++t) vac[Atom::jet(j, {t, o - t})] = 0.0;
    for (const auto& e : h.equations) CHECK(eval_numeric(e.expr, vac) == std::complex<double>(0, 0));
    CHECK(jet_coordinates(h.solved[1].rhs).count(parse_jet("Diff(u,t)")) == 0);
    CHECK_NOTHROW(h.validate());
}

TEST_CASE("prolonged system entries") {
    Atom u = Atom::jet("u");
    SubstitutionRules u_zero{{u, Expr(0)}, {Atom::jet("u", {0, 1}), Expr(0)}, {Atom::jet("u", {0, 2}), Expr(0)}};
    CHECK(substitute(lax_b(), u_zero).is_zero());
    CHECK(substitute(lax_a(), {{Atom::parameter("lambda"), Expr(0)}}) ==
          P("-alpha*I*u*v + beta*(v*Diff(u,x) - u*Diff(v,x))"));
    PdeSystem p = builtin_prolonged();
    CHECK(p.equations.size() == 8);
    CHECK_NOTHROW(p.validate());
    for (const auto& e : p.equations) CHECK(prolonged_closure().reduce(e.expr).is_zero());
}

TEST_CASE("zero curvature and compatibility") {
    const Closure& c = prolonged_closure();
    for (const char* n : {"phi", "psi", "f"}) {
        Expr mixed = Expr::jet(n, {1, 1});
        Expr xt = total_derivative(total_derivative(Expr::jet(n), Direction::x), Direction::t);
        CHECK(c.reduce(xt - mixed).is_zero());
        // Genuine check: differentiate the two first-order rules crosswise.
        JetCoordinate jx{n, {0, 1}}, jt{n, {1, 0}};
        Expr lhs = c.reduce(total_derivative(c.reduced(jx), Direction::t));
        Expr rhs = c.reduce(total_derivative(c.reduced(jt), Direction::x));
        CAPTURE(n);
        CHECK((lhs - rhs).is_zero());
    }
    CHECK(c.reduce(P("Diff(u,x)")) == P("Diff(u,x)"));
}

TEST_CASE("zero curvature fails for a broken Lax pair") {
    PdeSystem p = builtin_hirota_lax();
    for (auto& r : p.solved)
        if (r.lhs == parse_jet("Diff(phi,t)")) r.rhs = r.rhs + P("beta*u*phi");
    Closure c(p);
    Expr lhs = c.reduce(total_derivative(c.reduced(parse_jet("Diff(phi,x)")), Direction::t));
    Expr rhs = c.reduce(total_derivative(c.reduced(parse_jet("Diff(phi,t)")), Direction::x));
    CHECK_FALSE((lhs - rhs).is_zero());
}

TEST_CASE("reduction is a projection") {
    const Closure& c = prolonged_closure();
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        Expr e = random_polynomial(rng, 3, 2);
        Expr r = c.reduce(e);
        CHECK(c.reduce(r) == r);
        for (const auto& j : jet_coordinates(r)) CHECK_FALSE(c.is_eliminable(j));
    }
}

TEST_CASE("closure range") {
    Closure c(builtin_hirota(), 3);
    CHECK_THROWS_AS(c.reduce(Expr::jet("u", {2, 2})), ClosureRangeError);
    CHECK_NOTHROW(c.with_max_order(8).reduce(Expr::jet("u", {2, 2})));
}

TEST_CASE("non-terminating rules are caught") {
    std::vector<SolvedForm> loop{{parse_jet("Diff(u,t)"), P("Diff(v,t)"), "A"}, {parse_jet("Diff(v,t)"), P("Diff(u,t)"), "B"}};
    CHECK_THROWS_AS(Closure(loop).reduce(P("Diff(u,t)")), Error);
    PdeSystem bad;
    bad.dependents = {{"u", 1}, {"v", 1}};
    bad.solved = loop;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("consistent points") {
    PdeSystem p = builtin_prolonged();
    auto cp = consistent_point(p, 1);
    for (const auto& e : p.equations) CHECK(std::abs(cp.eval(e.expr)) < 1e-12);
    CHECK(std::abs(cp.eval(P("Diff(f,x) - phi*psi"))) < 1e-12);
    auto cp2 = consistent_point(p, 2);
    CHECK(cp.value(Atom::jet("u")) != cp2.value(Atom::jet("u")));
    Assignment a = cp.materialize(p, 2);
    CHECK(a.count(Atom::jet("phi", {1, 1})) == 1);
    CHECK(std::abs(eval_numeric(P("Diff(phi,x,t) - Diff(phi,t,x)"), a)) == 0.0);
}

TEST_CASE("numeric and symbolic reduction agree") {
    PdeSystem p = builtin_prolonged();
    auto closure = std::make_shared<Closure>(p);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
        ConsistentPoint cp(closure, 100 + k);
        Expr e = random_polynomial(rng, 3, 2);
        CHECK(std::abs(cp.eval(closure->reduce(e)) - cp.eval(e)) < 1e-9 * (1 + std::abs(cp.eval(e))));
    }
}

TEST_CASE("manifest round trip") {
    for (const auto& sys : builtin_corpus()) {
        std::string text = emit_manifest(sys);
        Manifest m = parse_manifest(text);
        CHECK(m.system.name == sys.name);
        REQUIRE(m.system.equations.size() == sys.equations.size());
        for (std::size_t i = 0; i < sys.equations.size(); ++i) {
            CHECK(m.system.equations[i].label == sys.equations[i].label);
            CHECK(m.system.equations[i].expr == sys.equations[i].expr);
        }
        REQUIRE(m.system.solved.size() == sys.solved.size());
        for (std::size_t i = 0; i < sys.solved.size(); ++i) {
            CHECK(m.system.solved[i].lhs == sys.solved[i].lhs);
            CHECK(m.system.solved[i].rhs == sys.solved[i].rhs);
        }
        CHECK(emit_manifest(m.system) == text);
    }
    CHECK_THROWS_AS(parse_manifest("[dependents]\nu 3\n[equations]\nw + u\n"), ManifestError);
    Manifest m = parse_manifest("[dependents]\nu 2\nv 2\n[symmetry]\nsigma_u = Diff(u,x)\nsigma_v = Diff(v,x)\n");
    CHECK(m.symmetry.size() == 2);
}
