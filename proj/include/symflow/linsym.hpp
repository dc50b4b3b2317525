#pragma once

#include <map>
#include <string>
#include <vector>

#include "symflow/expr.hpp"
#include "symflow/jetsys.hpp"
#include "symflow/vector_field.hpp"

namespace symflow {

// Evolutionary characteristics sigma keyed by dependent name.
struct SymmetryCandidate {
    std::map<std::string, Expr> components;

    Expr component(const std::string& dep) const;
    friend SymmetryCandidate operator+(const SymmetryCandidate& a, const SymmetryCandidate& b);
    friend SymmetryCandidate operator*(const Expr& s, const SymmetryCandidate& a);
};

class ComponentMismatch : public Error {
public:
    using Error::Error;
};

// Directional derivative of each selected equation along sigma. An empty
// label list selects every equation. Every dependent occurring in a selected
// equation needs a component, and every component must be a dependent of sys.
std::vector<Expr> frechet(const PdeSystem& sys, const SymmetryCandidate& sigma,
                          const std::vector<std::string>& labels = {});

struct SymmetryCheck {
    bool holds = false;
    std::vector<std::string> labels;
    std::vector<Expr> residuals;  // on-shell reduced, one per label
};

SymmetryCheck verify_symmetry(const PdeSystem& sys, const SymmetryCandidate& sigma,
                              const std::vector<std::string>& labels = {});
SymmetryCheck verify_symmetry(const PdeSystem& sys, const Closure& closure, const SymmetryCandidate& sigma,
                              const std::vector<std::string>& labels = {});

// sigma^a = xi^x a_x + xi^t a_t - eta^a for every dependent of sys.
SymmetryCandidate evolutionary_from_point(const VectorField& vf, const PdeSystem& sys);

// Constant families of point symmetries (constants c1..c6
// stay symbolic). The Hirota family acts on u, v only; the prolonged family
// on all five dependents.
VectorField hirota_family();
VectorField prolonged_family();
// The prolonged family with the psi coefficient (-2*c2*f + c1 - c5)*psi/2.
VectorField prolonged_family_flipped_psi();

// Checks the family on the given system and equations, identically in its constants.
bool verify_family(const PdeSystem& sys, const VectorField& family, const std::vector<std::string>& labels = {});

// Polynomial ansatz for a point symmetry: each unknown function (keyed by the
// coordinate it moves) is a general polynomial of bounded degree in its
// variables with symbolic coefficients k<Name><n>.
struct Ansatz {
    struct Unknown {
        std::string name;        // X, T, U, ...
        std::string coordinate;  // x, t, u, ...
        std::vector<std::string> variables;
    };
    std::vector<Unknown> unknowns;
    int degree = 2;

    // X, T and one unknown per dependent, all depending on x, t and every dependent.
    static Ansatz point(const PdeSystem& sys, int degree = 2);
};

struct DeterminingSystem {
    struct Constraint {
        std::string equation;
        Monomial key;  // monomial in x, t and jets
        Expr expr;     // linear homogeneous in the ansatz coefficients
    };
    std::vector<std::string> unknowns;
    std::vector<Atom> coefficients;
    VectorField field;  // the ansatz as a vector field
    std::vector<std::string> labels;
    std::vector<Expr> residuals;  // reduced residual per equation
    std::vector<Constraint> constraints;

    // Coefficient values realising vf; throws if vf is outside the ansatz.
    std::map<Atom, Expr> coordinates_of(const VectorField& vf) const;
    // Constraints evaluated at vf (all zero iff vf satisfies the system).
    std::vector<Expr> evaluate(const VectorField& vf) const;
    bool satisfied_by(const VectorField& vf) const;
};

DeterminingSystem generate_determining(const PdeSystem& sys, const Ansatz& ansatz,
                                       const std::vector<std::string>& labels = {});

}  // namespace symflow
