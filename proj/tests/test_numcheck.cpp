#include "doctest.h"

#include <cmath>
#include <random>

#include "symflow/grpflow.hpp"
#include "symflow/numcheck.hpp"
#include "test_support.hpp"

using namespace symflow;

TEST_CASE("vacuum seed solves the prolonged system") {
    for (const auto& r : vacuum_seed_residuals()) CHECK(r.is_zero());
}

TEST_CASE("vacuum grid") {
    VacuumSeed seed;
    Grid g = make_vacuum_grid(seed);
    CHECK(g.nx == 201);
    CHECK(g.nt == 101);
    double worst = 0;
    for (int n = 0; n < g.nt; n += 7)
        for (int i = 0; i < g.nx; i += 5) worst = std::max(worst, std::abs(g.at("phi", n, i) * g.at("psi", n, i) - 1.0));
    CHECK(worst < 1e-12);
    for (auto z : g.field("u")) CHECK(z == std::complex<double>(0, 0));
    CHECK(std::abs(g.at("f", 3, 150) - g.at("f", 3, 20) - (g.x(150) - g.x(20))) < 1e-12);
    CHECK(pde_residual(g, "F1", 1, 0.5) < 1e-12);
    CHECK(pde_residual(g, "F2", 1, 0.5) < 1e-12);
    CHECK(conserved_drift(g).max_drift < 1e-12);
    Grid small = make_vacuum_grid(seed, {5, 5, -1, 1, 0, 1});
    CHECK_THROWS_AS(pde_residual(small, "F1", 1, 0.5), GridError);
}

TEST_CASE("transformed vacuum converges at second order") {
    VacuumSeed seed;
    std::vector<double> res1, res2, drift;
    for (int level : {1, 2, 4}) {
        Grid g = map_solution(make_vacuum_grid(seed, GridSpec{}.refined(level)), 0.1);
        res1.push_back(pde_residual(g, "F1", seed.alpha, seed.beta));
        res2.push_back(pde_residual(g, "F2", seed.alpha, seed.beta));
        drift.push_back(conserved_drift(g).max_drift);
    }
    for (const auto* errs : {&res1, &res2, &drift}) {
        CAPTURE((*errs)[0]);
        for (double o : observed_orders(*errs)) {
            CHECK(o > 1.7);
            CHECK(o < 2.3);
        }
    }
}

TEST_CASE("perturbed grid does not converge") {
    VacuumSeed seed;
    std::vector<double> res;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0, 1e-3);
    for (int level : {1, 2}) {
        Grid g = map_solution(make_vacuum_grid(seed, GridSpec{}.refined(level)), 0.1);
        for (auto& z : g.field("u")) z += std::complex<double>(noise(rng), noise(rng));
        res.push_back(pde_residual(g, "F1", seed.alpha, seed.beta));
    }
    CHECK(res[0] > 1.0);
    CHECK(res[1] > res[0]);
}

TEST_CASE("zero grid has no density") {
    Grid g = make_vacuum_grid(VacuumSeed{}, {11, 11, 0, 1, 0, 1});
    for (auto& z : g.field("f")) z = 0;
    auto d = conserved_drift(g);
    for (double v : d.density) CHECK(v == 0.0);
}

TEST_CASE("grid file round trip") {
    Grid g = map_solution(make_vacuum_grid(VacuumSeed{}, {21, 9, -5, 5, 0, 0.5}), 0.1);
    std::string text = write_grid(g);
    Grid back = read_grid(text);
    CHECK(back.nx == g.nx);
    CHECK(back.dx == g.dx);
    for (const auto& [name, v] : g.fields) CHECK(back.field(name) == v);
    CHECK(write_grid(back) == text);
    CHECK(parse_complex("1.5-2e-05i") == std::complex<double>(1.5, -2e-05));
    CHECK(parse_complex("-3") == std::complex<double>(-3, 0));
    CHECK_THROWS_AS(read_grid("grid 2 1 0 1 0 1\nfield u\n1+0i\n"), GridError);
    CHECK_THROWS_AS(read_grid("nonsense"), GridError);
}
