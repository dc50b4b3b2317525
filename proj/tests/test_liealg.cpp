#include <random>

#include "doctest.h"
#include "symflow/liealg.hpp"
#include "symflow/parser.hpp"
#include "symflow/random_expr.hpp"
#include "test_support.hpp"

using namespace symflow;

namespace {

std::vector<Expr> unit(std::size_t n, std::size_t i, Expr s = Expr(1)) {
    std::vector<Expr> e(n);
    e[i] = s;
    return e;
}

const StructureTable& full_table() {
    static const StructureTable t = structure_table(prolonged_generators(), generator_labels());
    return t;
}

}  // namespace

TEST_CASE("commutators of the prolonged generators") {
    auto g = prolonged_generators();
    CHECK(commutator(g[4], g[5]).is_zero());
    CHECK(commutator(g[0], g[2]) == -1 * g[2]);
    CHECK(commutator(g[1], g[2]) == -2 * g[0]);
    CHECK(commutator(g[0], g[1]) == g[1]);
    VectorField bad;
    bad.set("u", Expr::jet("u", {0, 1}));
    CHECK_THROWS_AS(commutator(bad, g[0]), Error);
}

TEST_CASE("structure table") {
    const auto& t = full_table();
    REQUIRE(t.closed);
    CHECK(t.antisymmetric);
    CHECK(t.jacobi);
    CHECK(t.problems.empty());
    CHECK(t.format_bracket(0, 1) == "v2");
    CHECK(t.format_bracket(0, 2) == "-v3");
    CHECK(t.format_bracket(1, 2) == "-2*v1");
    auto c = t.center();
    CHECK(c == std::vector<std::size_t>{3, 4, 5});
}

TEST_CASE("decompose rejects fields outside the span") {
    auto g = prolonged_generators();
    VectorField w;
    w.set("f", parse("f^3"));
    CHECK_FALSE(decompose(w, g).has_value());
    auto d = decompose(g[1] + Expr(3) * g[5], g);
    REQUIRE(d);
    CHECK((*d)[1] == Coefficient(1));
    CHECK((*d)[5] == Coefficient(3));
}

TEST_CASE("adjoint action") {
    const auto& t = full_table();
    Expr eps = Expr::parameter("epsilon");
    auto a = adjoint(t, 0, unit(6, 2), eps);
    CHECK(a[2] == exp(eps));
    auto b = adjoint(t, 2, unit(6, 1), eps);
    CHECK(b[0] == Expr(-2) * eps);
    CHECK(b[1] == Expr(1));
    CHECK(b[2] == eps * eps);
    auto c = adjoint(t, 4, unit(6, 5), eps);
    CHECK(c == unit(6, 5));
    auto d = adjoint(t, 2, unit(6, 0), eps);
    CHECK(d[0] == Expr(1));
    CHECK(d[2] == -eps);
}

TEST_CASE("adjoint maps are automorphisms") {
    const auto& t = full_table();
    Expr eps = Expr::parameter("epsilon");
    for (std::size_t g : {1, 2})
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                auto lhs = adjoint(t, g, t.bracket(unit(6, i), unit(6, j)), eps);
                auto rhs = t.bracket(adjoint(t, g, unit(6, i), eps), adjoint(t, g, unit(6, j), eps));
                for (std::size_t k = 0; k < 6; ++k) CHECK(lhs[k] == rhs[k]);
            }
}

TEST_CASE("normalization") {
    auto g = prolonged_generators();
    StructureTable sub = structure_table({g[0], g[1], g[2]}, {"v1", "v2", "v3"});
    auto n = normalize_element(sub, {1, 2, 3});
    REQUIRE(n.found);
    CHECK(n.representative == "v2+alpha*v3");
    CHECK(*n.alpha == Coefficient::rational(23, 16));
    CHECK(killing_invariant(n.start) == killing_invariant(n.end));

    n = normalize_element(sub, {2, 0, 5});
    CHECK(n.representative == "v1");
    n = normalize_element(sub, {3, 1, 0});
    CHECK(n.representative == "v1");
    CHECK(n.steps.size() == 1);
    n = normalize_element(sub, {0, 0, 4});
    CHECK(n.representative == "v3");
    CHECK(n.steps.empty());
}

TEST_CASE("optimal system report") {
    auto rep = verify_optimal_system(1, 100);
    CHECK(rep.samples.size() == 100);
    for (const auto& c : rep.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.status != Status::fail);
    }
}

TEST_CASE("a2 != 0 elements reach the v2 + alpha v3 family") {
    auto g = prolonged_generators();
    StructureTable sub = structure_table({g[0], g[1], g[2]}, {"v1", "v2", "v3"});
    std::vector<Expr> a{Expr(1), Expr(1), Expr(0)};
    auto b = adjoint(sub, 2, a, Expr::rational(1, 2));
    CHECK(b[0] == Expr(0));
    CHECK(b[1] == Expr(1));
    CHECK(b[2] == Expr::rational(-1, 4));
    // The same element normalizes to v1, which its case condition a1 != 0 names.
    CHECK(normalize_element(sub, {1, 1, 0}).representative == "v1");
}

TEST_CASE("bracket properties on random point fields") {
    std::mt19937_64 rng(5);
    auto field = [&] {
        VectorField v;
        for (const char* k : {"x", "u", "phi", "f"}) v.set(k, random_polynomial(rng, 2, 0));
        return v;
    };
    for (int k = 0; k < 20; ++k) {
        VectorField a = field(), b = field(), c = field();
        CHECK(commutator(a, b) == -1 * commutator(b, a));
        CHECK(commutator(a + b, c) == commutator(a, c) + commutator(b, c));
        CHECK((commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))).is_zero());
    }
}
