#include "doctest.h"

#include <random>

#include "symflow/random_expr.hpp"
#include "symflow/expr.hpp"
#include "symflow/parser.hpp"
#include "test_support.hpp"

using namespace symflow;

namespace {

Expr P(const char* s) { return parse(s); }

}  // namespace

TEST_CASE("parse examples") {
    Expr e = P("Diff(u,x) + I*lambda*u");
    CHECK(e == Expr::jet("u", {0, 1}) + Expr::imaginary_unit() * Expr::parameter("lambda") * Expr::jet("u"));
    CHECK(P("Exp(0)*v") == Expr::jet("v"));
    CHECK_THROWS_WITH_AS(P("Diff(u,y)"), doctest::Contains("unknown independent variable y"), ParseError);
    CHECK_THROWS_AS(P("w + u"), ParseError);
    CHECK_THROWS_AS(P("u^(1/2)"), ParseError);
    CHECK_THROWS_AS(P("u + "), ParseError);
    CHECK(P("3/4") == Expr::rational(3, 4));
    CHECK(P("Diff(u,x,t)") == P("Diff(u,t,x)"));
    try {
        P("u + * v");
        FAIL("expected throw");
    } catch (const ParseError& err) {
        CHECK(err.offset() == 4);
    }
}

TEST_CASE("canonicalize examples") {
    CHECK(P("(u+v)*(u-v)") == P("u^2 - v^2"));
    CHECK(P("Exp(x)*Exp(t)") == P("Exp(x+t)"));
    CHECK(P("I*I*u") == P("-u"));
    CHECK(P("u/u") == Expr(1));
    CHECK(P("(u^2-v^2)/(u+v)") == P("u-v"));
    CHECK(P("1/(1-epsilon*f) - 1/(1-epsilon*f)").is_zero());
    CHECK((P("1/(2*u+2*v)") * P("u+v")) == Expr::rational(1, 2));
    CHECK(P("Exp(x)*Exp(-x)") == Expr(1));
}

TEST_CASE("printing") {
    CHECK(to_string(P("u^2 - v^2")) == "u^2 - v^2");
    CHECK(to_string(P("Diff(u,t,x,x)")) == "Diff(u,x,x,t)");
    CHECK(to_string(P("-I*u/2")) == "-1/2*I*u");
    CHECK(to_string(Expr()) == "0");
    for (const char* s : {"u + 1/(1-epsilon*f)", "(2+3*I)*alpha*u^3 - 1/3*Diff(phi,x)", "Exp(I*lambda*x)*psi^(-2)",
                          "f/(1-epsilon*f)^2 + x*t"}) {
        Expr e = P(s);
        CAPTURE(to_string(e));
        CHECK(P(to_string(e).c_str()) == e);
    }
}

TEST_CASE("diff examples") {
    Atom ux = Atom::jet("u", {0, 1});
    CHECK(diff(P("Diff(u,x)^2"), ux) == P("2*Diff(u,x)"));
    CHECK(diff(P("Diff(u,x)*u"), Atom::jet("u")) == P("Diff(u,x)"));
    CHECK(diff(P("Exp(lambda*x)"), Atom::parameter("lambda")) == P("x*Exp(lambda*x)"));
    CHECK(diff(P("1/(1-epsilon*f)"), Atom::parameter("epsilon")) == P("f/(1-epsilon*f)^2"));
}

TEST_CASE("total derivative examples") {
    CHECK(total_derivative(P("u"), Direction::x) == P("Diff(u,x)"));
    CHECK(total_derivative(P("phi*psi"), Direction::x) == P("Diff(phi,x)*psi + phi*Diff(psi,x)"));
    CHECK(total_derivative(P("x*t"), Direction::t) == P("x"));
    CHECK(total_derivative(P("Exp(I*lambda*x)"), Direction::x) == P("I*lambda*Exp(I*lambda*x)"));
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        Expr e = random_polynomial(rng);
        CHECK((total_derivative(total_derivative(e, Direction::x), Direction::t) -
               total_derivative(total_derivative(e, Direction::t), Direction::x))
                  .is_zero());
    }
}

TEST_CASE("substitute examples") {
    Atom ut = Atom::jet("u", {1, 0});
    CHECK(substitute(P("Diff(u,t) + u"), {{ut, P("-u")}}).is_zero());
    CHECK(substitute(P("Diff(phi,x)^2"), {{Atom::jet("phi", {0, 1}), P("-I*lambda*phi + u*psi")}}) ==
          P("-lambda^2*phi^2 - 2*I*lambda*phi*u*psi + u^2*psi^2"));
    CHECK(substitute(P("u"), {{ut, Expr(0)}}) == P("u"));
    CHECK(substitute(P("1/(1-f)"), {{Atom::jet("f"), Expr(0)}}) == Expr(1));
}

TEST_CASE("eval examples") {
    CHECK(eval_numeric(P("I*u"), Assignment{{Atom::jet("u"), {2, 0}}}) == std::complex<double>(0, 2));
    CHECK(eval_numeric(P("Exp(x)"), Assignment{{Atom::independent(Direction::x), {0, 0}}}) == std::complex<double>(1, 0));
    CHECK(std::abs(eval_numeric(P("Diff(u,x)^2 - 4"), Assignment{{Atom::jet("u", {0, 1}), {2, 0}}})) == 0.0);
    CHECK_THROWS_AS(eval_numeric(P("u+v"), Assignment{{Atom::jet("u"), {1, 0}}}), EvaluationError);
}

TEST_CASE("zero test soundness") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int k = 0; k < 100; ++k) {
        Expr a = random_polynomial(rng);
        Expr b = random_polynomial(rng);
        Expr zero = (a + b) * (a - b) - (a * a - b * b);
        CHECK(zero.is_zero());
        Expr nz = a * b + 1;
        auto val = [&](const Atom&) { return std::complex<double>(g(rng), g(rng)); };
        if (!nz.is_zero()) {
            bool nonzero = false;
            for (int p = 0; p < 5; ++p) nonzero = nonzero || std::abs(eval_numeric(nz, AtomValueFn(val))) > 1e-9;
            CHECK(nonzero);
        }
    }
}

TEST_CASE("canonicalize idempotent and linearity") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        Expr a = random_polynomial(rng);
        Expr b = random_polynomial(rng);
        Expr c = canonicalize(a * b);
        CHECK(canonicalize(c) == c);
        CHECK(c == a * b);
        Expr lin = total_derivative(Expr::rational(3, 2) * a + b, Direction::x) -
                   (Expr::rational(3, 2) * total_derivative(a, Direction::x) + total_derivative(b, Direction::x));
        CHECK(lin.is_zero());
    }
}
