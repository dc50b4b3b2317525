#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "symflow/jetsys.hpp"
#include "symflow/vector_field.hpp"

namespace symflow {

// E_w(L) = sum over jets w_J of L of (-D)^J dL/dw_J.
Expr euler_lagrange(const Expr& L, const std::string& wrt);

std::vector<std::string> multiplier_names();  // m1..m8

// L = sum_b m_b F_b over the equations of the prolonged system.
struct FormalLagrangian {
    Expr expr;
    PdeSystem system;
    std::vector<std::string> multipliers;

    // Throws unless L is multiplier-linear and free of mixed derivatives.
    void validate() const;
};

FormalLagrangian formal_lagrangian(const PdeSystem& sys);
FormalLagrangian formal_lagrangian();

struct AdjointSystem {
    std::vector<std::string> labels;  // E_u, E_v, ...
    std::vector<Expr> equations;
    std::vector<SolvedForm> solved;
    // System solved forms followed by the adjoint ones.
    std::shared_ptr<const Closure> combined;
};

class IsolationError : public Error {
public:
    using Error::Error;
};

// Isolates m1_t, m2_t, m3_x, m4_x and m7_x from E_u, E_v, E_phi, E_psi, E_f.
AdjointSystem adjoint_system(const FormalLagrangian& L, int max_order = Closure::default_max_order);

struct ConservedVector {
    Expr Tt;
    Expr Tx;
    VectorField generator;
    std::string notes;
};

// Conserved vector of a point generator for a Lagrangian with derivatives of
// order at most 3 in x and 1 in t, without mixed derivatives.
ConservedVector conserved_vector(const VectorField& vf, const FormalLagrangian& L);
// (f_x, -f_t).
ConservedVector potential_conserved_vector();
// (D_x H, -D_t H), divergence-free for every H.
ConservedVector trivial_conserved_vector(const Expr& H);

struct DivergenceCheck {
    bool holds = false;
    Expr residual;  // reduced divergence
    double numeric_max = 0.0;
    int max_order = 0;  // closure order actually used
};

DivergenceCheck verify_divergence(const ConservedVector& cv, const AdjointSystem& adj, int numeric_points = 10,
                                  std::uint64_t seed = 1);

// "vanishes on-shell", "nonzero on-shell" or "not assessed".
std::string assess_triviality(const ConservedVector& cv, const AdjointSystem& adj);

}  // namespace symflow
