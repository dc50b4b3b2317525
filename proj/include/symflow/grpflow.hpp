#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symflow/expr.hpp"
#include "symflow/grid.hpp"
#include "symflow/report.hpp"
#include "symflow/vector_field.hpp"

namespace symflow {

// Finite transformation of the localized generator in closed form: rules for
// u, v, phi, psi, f in terms of the unbarred variables and `epsilon`.
struct FlowMap {
    Atom epsilon = Atom::parameter("epsilon");
    std::map<std::string, Expr> rules;

    // The flow with epsilon replaced by e.
    FlowMap at(const Expr& e) const;
    // (this after other): substitutes other's rules into this map's rules.
    FlowMap after(const FlowMap& other) const;
};

// phi^2 d/du + psi^2 d/dv + phi f d/dphi + psi f d/dpsi + f^2 d/df.
VectorField localized_generator();

FlowMap closed_form_flow();
// Same u, v rules with phi, psi, f negated (f -> f/(epsilon*f - 1)); fails the group law.
FlowMap flipped_flow();

class PoleError : public Error {
public:
    using Error::Error;
};

inline constexpr double pole_threshold = 1e-6;

// State order: u, v, phi, psi, f.
using FlowState = std::array<std::complex<double>, 5>;
const std::array<std::string, 5>& flow_variables();

// Classical fourth-order Runge-Kutta on d(state)/d(eps) = generator(state).
FlowState ivp_oracle(const FlowState& initial, double epsilon, int steps);
FlowState apply_flow(const FlowMap& flow, const FlowState& s, double epsilon);

struct FlowProperties {
    std::vector<CheckResult> checks;
    bool ode_holds = false;
    bool group_law_holds = false;
    bool infinitesimal_holds = false;
    double oracle_max_error = 0.0;
};

// ODE consistency, group law in (epsilon1, epsilon2), first-order term, and
// agreement with the RK4 oracle at `samples` random states.
FlowProperties verify_flow_properties(const FlowMap& flow, std::uint64_t seed = 1, int samples = 10,
                                      double tolerance = 1e-7);

// Pointwise application of the flow to a grid carrying u, v, phi, psi, f.
Grid map_solution(const Grid& g, double epsilon, const FlowMap& flow = closed_form_flow());

}  // namespace symflow
