#pragma once

#include <random>
#include <vector>

#include "symflow/expr.hpp"

namespace symflow {

// Random differential polynomial in u, v, phi, psi, f and their low-order jets.
inline Expr random_polynomial(std::mt19937_64& rng, int terms = 4, int max_order = 2,
                              std::vector<std::string> names = {"u", "v", "phi", "psi", "f"}) {
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> nfac(0, 3);
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    std::uniform_int_distribution<int> ord(0, max_order);
    std::uniform_int_distribution<int> coin(0, 3);
    Expr out;
    for (int k = 0; k < terms; ++k) {
        Expr term = Coefficient(mpq_class(coeff(rng)), mpq_class(coin(rng) == 0 ? coeff(rng) : 0));
        int n = nfac(rng);
        for (int j = 0; j < n; ++j) {
            int o = ord(rng);
            std::uniform_int_distribution<int> split(0, o);
            int tx = split(rng);
            term *= Expr::jet(names[pick(rng)], DerivIndex{tx, o - tx});
        }
        if (coin(rng) == 0) term *= Expr::independent(Direction::x);
        if (coin(rng) == 0) term *= Expr::parameter("alpha");
        out += term;
    }
    return out;
}

}  // namespace symflow
