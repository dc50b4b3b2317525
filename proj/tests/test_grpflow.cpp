#include "doctest.h"

#include <cmath>

#include "symflow/grpflow.hpp"
#include "symflow/numcheck.hpp"
#include "symflow/parser.hpp"
#include "test_support.hpp"

using namespace symflow;

namespace {
Expr P(const char* s) { return parse(s); }
}  // namespace

TEST_CASE("closed form flow") {
    FlowMap m = closed_form_flow();
    FlowMap id = m.at(Expr(0));
    for (const auto& name : flow_variables()) CHECK(id.rules.at(name) == Expr::jet(name));
    CHECK((m.rules.at("u") * P("1 - epsilon*f") - P("u*(1 - epsilon*f) + epsilon*phi^2")).is_zero());
    FlowMap printed = flipped_flow();
    CHECK(printed.rules.at("u") == m.rules.at("u"));
    CHECK(printed.rules.at("v") == m.rules.at("v"));
    CHECK(printed.rules.at("f") == -m.rules.at("f"));
}

TEST_CASE("flow properties") {
    auto good = verify_flow_properties(closed_form_flow());
    CHECK(good.ode_holds);
    CHECK(good.group_law_holds);
    CHECK(good.infinitesimal_holds);
    CHECK(good.oracle_max_error < 1e-7);
    CHECK(all_passed(good.checks));

    auto bad = verify_flow_properties(flipped_flow());
    CHECK_FALSE(bad.ode_holds);
    CHECK_FALSE(bad.group_law_holds);
    CHECK_FALSE(all_passed(bad.checks));

    FlowMap f = closed_form_flow();
    Expr fbar = f.rules.at("f");
    CHECK(diff(fbar, f.epsilon) == fbar * fbar);
    FlowMap only_f;
    only_f.rules = {{"f", flipped_flow().rules.at("f")}};
    Expr e1 = Expr::parameter("epsilon1"), e2 = Expr::parameter("epsilon2");
    CHECK_FALSE(only_f.at(e1).after(only_f.at(e2)).rules.at("f") == only_f.at(e1 + e2).rules.at("f"));
}

TEST_CASE("ivp oracle") {
    FlowState s{0, 0, 0, 0, 1};
    FlowState r = ivp_oracle(s, 0.5, 200);
    CHECK(std::abs(r[4] - 2.0) < 1e-8);
    for (int i = 0; i < 4; ++i) CHECK(r[i] == std::complex<double>(0, 0));
    FlowState z = ivp_oracle({1, 2, 3, 4, 0.5}, 0.0, 10);
    CHECK(z == FlowState{1, 2, 3, 4, 0.5});

    // Fourth-order convergence towards the closed form near the pole.
    std::vector<double> errs;
    for (int steps : {4000, 8000, 16000}) errs.push_back(std::abs(ivp_oracle(s, 0.999, steps)[4] - 1000.0));
    auto orders = observed_orders(errs);
    for (double o : orders) CHECK(o == doctest::Approx(4.0).epsilon(0.1));
    CHECK(errs.back() < 1e-2);

    CHECK_THROWS_AS(ivp_oracle(s, 1.0, 100), PoleError);
    CHECK_THROWS_AS(ivp_oracle(s, 0.5, 0), Error);
}

TEST_CASE("map solution") {
    Grid g = make_vacuum_grid(VacuumSeed{});
    Grid same = map_solution(g, 0.0);
    CHECK(same.field("u") == g.field("u"));
    Grid moved = map_solution(g, 0.1);
    double mx = 0;
    for (auto z : moved.field("u")) mx = std::max(mx, std::abs(z));
    CHECK(mx > 1e-3);
    Grid pole = g;
    pole.field("f")[17] = 10.0;
    CHECK_THROWS_AS(map_solution(pole, 0.1), PoleError);
}
