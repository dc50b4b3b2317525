#include <chrono>
#include <future>
#include <random>

#include "doctest.h"
#include "symflow/random_expr.hpp"
#include "symflow/conslaw.hpp"
#include "symflow/liealg.hpp"
#include "symflow/linsym.hpp"
#include "test_support.hpp"

using namespace symflow;

namespace {

const FormalLagrangian& lagrangian() {
    static const FormalLagrangian L = formal_lagrangian();
    return L;
}

const AdjointSystem& adjoint() {
    static const AdjointSystem a = adjoint_system(lagrangian());
    return a;
}

}  // namespace

TEST_CASE("Euler-Lagrange examples") {
    CHECK(euler_lagrange(parse("m1*(Diff(u,t) - Diff(u,x,x))"), "u") == parse("-Diff(m1,t) - Diff(m1,x,x)"));
    CHECK(euler_lagrange(parse("Diff(u,x)^2/2"), "u") == parse("-Diff(u,x,x)"));
    CHECK(euler_lagrange(parse("u^3 + x*u"), "u") == parse("3*u^2 + x"));
    CHECK(euler_lagrange(lagrangian().expr, "f") == parse("-Diff(m7,x) - Diff(m8,t)"));
}

TEST_CASE("Euler-Lagrange annihilates total divergences") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        Expr A = random_polynomial(rng, 3, 2), B = random_polynomial(rng, 3, 2);
        Expr div = total_derivative(A, Direction::x) + total_derivative(B, Direction::t);
        for (const char* w : {"u", "v", "phi", "psi", "f"}) CHECK(euler_lagrange(div, w).is_zero());
    }
}

TEST_CASE("formal Lagrangian") {
    const auto& L = lagrangian();
    CHECK(L.multipliers.size() == 8);
    CHECK(on_shell_reduce(L.expr, L.system).is_zero());
    CHECK(diff(L.expr, Atom::jet("u", {1, 0})) == parse("I*m1"));
    FormalLagrangian bad = L;
    bad.expr += parse("m1*Diff(u,t,x)");
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = L;
    bad.expr += parse("m1*m2");
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("adjoint system") {
    const auto& a = adjoint();
    REQUIRE(a.equations.size() == 5);
    CHECK(a.solved.size() == 5);
    CHECK(diff(a.equations[0], Atom::jet("m1", {1, 0})) == parse("-I"));
    CHECK(to_string(a.solved[2].lhs) == "Diff(m3,x)");
    CHECK(to_string(a.solved[3].lhs) == "Diff(m4,x)");
    CHECK(a.solved[4].rhs == parse("-Diff(m8,t)"));
    // Multipliers m5, m6, m8 stay free.
    CHECK_FALSE(a.combined->is_eliminable({"m5", {3, 0}}));
    CHECK_FALSE(a.combined->is_eliminable({"m8", {2, 2}}));
    CHECK(a.combined->is_eliminable({"m7", {1, 1}}));
}

TEST_CASE("adjoint isolation failure") {
    PdeSystem sys;
    sys.name = "quasi";
    sys.dependents = {{"u", 2}};
    sys.equations.push_back({"F1", parse("u*Diff(u,t) - Diff(u,x,x)")});
    CHECK_THROWS_AS(adjoint_system(formal_lagrangian(sys)), IsolationError);
}

TEST_CASE("v3 conserved vector") {
    auto g = prolonged_generators();
    auto cv = conserved_vector(g[2], lagrangian());
    CHECK(cv.Tt == parse("m8"));
    CHECK(cv.Tx == parse("m7"));
    auto r = verify_divergence(cv, adjoint());
    CHECK(r.holds);
    CHECK(r.numeric_max < 1e-9);
    CHECK(assess_triviality(cv, adjoint()) == "not assessed");
}

TEST_CASE("potential and trivial conserved vectors") {
    auto r = verify_divergence(potential_conserved_vector(), adjoint());
    CHECK(r.holds);
    CHECK(r.numeric_max < 1e-9);
    auto H = parse("u*Diff(v,x) + phi^2*psi + x*f*m5");
    auto tr = trivial_conserved_vector(H);
    CHECK(verify_divergence(tr, adjoint()).holds);
    CHECK(assess_triviality(trivial_conserved_vector(parse("Diff(f,x) - phi*psi")), adjoint()) == "vanishes on-shell");
}

TEST_CASE("conserved vectors of v1..v6") {
    auto g = prolonged_generators();
    auto labels = generator_labels();
    std::vector<std::future<DivergenceCheck>> jobs;
    for (const auto& v : g)
        jobs.push_back(std::async(std::launch::async, [&v] { return verify_divergence(conserved_vector(v, lagrangian()), adjoint()); }));
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto r = jobs[i].get();
        INFO(labels[i] << " residual " << to_string(r.residual).substr(0, 300));
        CHECK(r.holds);
        CHECK(r.numeric_max < 1e-9);
    }
}

TEST_CASE("conserved vector of the symmetry family") {
    auto r = verify_divergence(conserved_vector(prolonged_family(), lagrangian()), adjoint());
    CHECK(r.holds);
    CHECK(r.numeric_max < 1e-9);
}

TEST_CASE("a non-symmetry fails the divergence check") {
    VectorField w;
    w.set("u", parse("phi"));
    auto r = verify_divergence(conserved_vector(w, lagrangian()), adjoint(), 3);
    CHECK_FALSE(r.holds);
    CHECK(r.numeric_max > 1e-6);
}
