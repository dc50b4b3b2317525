#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "symflow/grid.hpp"
#include "symflow/jetsys.hpp"
#include "symflow/report.hpp"

namespace symflow {

struct PipelineOptions {
    int max_order = Closure::default_max_order;
    std::uint64_t seed = 1;
    int numeric_points = 10;
    int random_cases = 100;
};

// Cross-differentiated Lax equations and the f potential reduce to zero.
std::vector<CheckResult> zero_curvature_checks(const PipelineOptions& o);
// (f_x, -f_t) passes the divergence check.
std::vector<CheckResult> potential_law_checks(const PipelineOptions& o);

// family: "nonlocal", "localized", "hirota", "prolonged" or "all".
std::vector<CheckResult> symmetry_checks(const std::string& family, const PipelineOptions& o);
// User supplied system with a [symmetry] section.
std::vector<CheckResult> manifest_symmetry_checks(const Manifest& m, const PipelineOptions& o);

struct FlowRun {
    double epsilon = 0.1;
    bool group_law = true;
    std::vector<int> levels{1, 2, 4};
};
std::vector<CheckResult> finite_transform_checks(const FlowRun& run, const PipelineOptions& o);
// Residual and drift of an arbitrary grid carrying u, v, f.
std::vector<CheckResult> grid_checks(const Grid& g, double alpha, double beta);

std::vector<CheckResult> optimal_system_checks(const PipelineOptions& o, nlohmann::json* data = nullptr);

// generator: "v1".."v6", "family" or "all".
std::vector<CheckResult> conservation_checks(const std::string& generator, const PipelineOptions& o);
// Lines "Tt = expr" and "Tx = expr" compared with the computed vector (info only).
std::vector<CheckResult> diagnose_conserved_vector(const std::string& generator, const std::string& transcription,
                                                   const PipelineOptions& o);

std::vector<CheckResult> kernel_property_checks(const PipelineOptions& o);
std::vector<CheckResult> corpus_checks(const PipelineOptions& o);

struct Criterion {
    int number;
    std::string title;
    std::function<std::vector<CheckResult>(const PipelineOptions&)> run;
};
const std::vector<Criterion>& acceptance_criteria();

}  // namespace symflow
