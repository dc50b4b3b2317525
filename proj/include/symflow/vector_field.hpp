#pragma once

#include <map>
#include <string>
#include <vector>

#include "symflow/expr.hpp"

namespace symflow {

// Point vector field on {x, t, u, v, phi, psi, f}: xi^x, xi^t and eta^alpha
// keyed by coordinate name. Missing entries are zero.
struct VectorField {
    std::map<std::string, Expr> coeffs;

    Expr coefficient(const std::string& coord) const;
    VectorField& set(const std::string& coord, const Expr& value);

    // v(g) = sum_k v^k dg/dz^k.
    Expr apply(const Expr& g) const;
    bool is_zero() const;

    friend VectorField operator+(const VectorField& a, const VectorField& b);
    friend VectorField operator-(const VectorField& a, const VectorField& b);
    friend VectorField operator*(const Expr& s, const VectorField& a);
    friend bool operator==(const VectorField& a, const VectorField& b);
};

// Coordinate atom: x and t are independent variables, anything else a jet.
Atom coordinate_atom(const std::string& name);

// The seven coordinates in the order x, t, u, v, phi, psi, f.
const std::vector<std::string>& point_coordinates();

std::string to_string(const VectorField& v);

}  // namespace symflow
