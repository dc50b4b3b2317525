#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symflow/report.hpp"
#include "symflow/vector_field.hpp"

namespace symflow {

// [a,b]^k = a(b^k) - b(a^k). Throws on coefficients with derivative coordinates.
VectorField commutator(const VectorField& a, const VectorField& b);

// v1..v6 of the prolonged system (v2 is the localized generator).
std::vector<VectorField> prolonged_generators();
std::vector<std::string> generator_labels();

// Coefficients of w in the basis, or nullopt when w is outside the span.
std::optional<std::vector<Coefficient>> decompose(const VectorField& w, const std::vector<VectorField>& basis);

struct StructureTable {
    std::vector<std::string> labels;
    // constants[i][j][k]: coefficient of v_k in [v_i, v_j]
    std::vector<std::vector<std::vector<Coefficient>>> constants;
    bool closed = true;
    bool antisymmetric = true;
    bool jacobi = true;
    std::vector<std::string> problems;

    std::size_t size() const { return labels.size(); }
    // Brackets of coordinate vectors (entries may be symbolic).
    std::vector<Expr> bracket(const std::vector<Expr>& a, const std::vector<Expr>& b) const;
    // Indices j with [v_i, v_j] = 0 for every i.
    std::vector<std::size_t> center() const;
    std::string format_bracket(std::size_t i, std::size_t j) const;
};

StructureTable structure_table(const std::vector<VectorField>& basis, const std::vector<std::string>& labels);

class AdjointError : public Error {
public:
    using Error::Error;
};

// Ad(exp(eps v_i)) w = w - eps [v_i, w] + eps^2/2 [v_i, [v_i, w]] - ..., in
// coordinates. The series is summed per basis vector when ad_v is nilpotent
// on it (at most 12 terms) or when it is an eigenvector of ad_v.
std::vector<Expr> adjoint(const StructureTable& table, std::size_t i, const std::vector<Expr>& w, const Expr& eps);

// Killing form restricted to span{v1, v2, v3}: 2 (a1^2 - 4 a2 a3).
Coefficient killing_invariant(const std::vector<Coefficient>& a);

struct OrbitStep {
    std::size_t generator;  // index into the basis (0-based)
    Coefficient epsilon;
};

struct Normalization {
    std::vector<Coefficient> start;
    std::vector<OrbitStep> steps;
    std::vector<Coefficient> end;
    std::string representative;  // "v1", "v3" or "v2+alpha*v3"
    std::optional<Coefficient> alpha;
    bool found = false;
};

// Searches compositions of at most `depth` adjoint maps of v2, v3 (epsilon
// solved exactly from one linear condition per step) that bring
// a1 v1 + a2 v2 + a3 v3 to a representative up to scale.
Normalization normalize_element(const StructureTable& table, const std::vector<Coefficient>& a, int depth = 3);

struct OptimalSystemReport {
    std::vector<CheckResult> checks;
    std::vector<Normalization> samples;
};

OptimalSystemReport verify_optimal_system(std::uint64_t seed = 1, int samples = 100);

}  // namespace symflow
