#include "symflow/vector_field.hpp"

namespace symflow {

Atom coordinate_atom(const std::string& name) {
    if (name == "x") return Atom::independent(Direction::x);
    if (name == "t") return Atom::independent(Direction::t);
    return Atom::jet(name);
}

const std::vector<std::string>& point_coordinates() {
    static const std::vector<std::string> names{"x", "t", "u", "v", "phi", "psi", "f"};
    return names;
}

Expr VectorField::coefficient(const std::string& coord) const {
    auto it = coeffs.find(coord);
    return it == coeffs.end() ? Expr() : it->second;
}

VectorField& VectorField::set(const std::string& coord, const Expr& value) {
    if (value.is_zero()) coeffs.erase(coord);
    else coeffs[coord] = value;
    return *this;
}

Expr VectorField::apply(const Expr& g) const {
    std::vector<Expr> parts;
    for (const auto& [k, c] : coeffs) parts.push_back(c * diff(g, coordinate_atom(k)));
    return sum(parts);
}

bool VectorField::is_zero() const {
    for (const auto& [k, c] : coeffs)
        if (!c.is_zero()) return false;
    return true;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    VectorField out = a;
    for (const auto& [k, c] : b.coeffs) out.set(k, a.coefficient(k) + c);
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) { return a + Expr(-1) * b; }

VectorField operator*(const Expr& s, const VectorField& a) {
    VectorField out;
    for (const auto& [k, c] : a.coeffs) out.set(k, s * c);
    return out;
}

bool operator==(const VectorField& a, const VectorField& b) { return (a - b).is_zero(); }

std::string to_string(const VectorField& v) {
    std::string out;
    for (const auto& name : point_coordinates()) {
        Expr c = v.coefficient(name);
        if (c.is_zero()) continue;
        if (!out.empty()) out += " + ";
        out += "(" + to_string(c) + ")*d/d" + name;
    }
    for (const auto& [k, c] : v.coeffs) {
        bool listed = false;
        for (const auto& name : point_coordinates()) listed = listed || name == k;
        if (listed) continue;
        if (!out.empty()) out += " + ";
        out += "(" + to_string(c) + ")*d/d" + k;
    }
    return out.empty() ? "0" : out;
}

}  // namespace symflow
