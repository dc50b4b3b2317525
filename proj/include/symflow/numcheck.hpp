#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "symflow/grid.hpp"
#include "symflow/jetsys.hpp"

namespace symflow {

// Exact solution of the prolonged system built on u = v = 0.
struct VacuumSeed {
    std::complex<double> lambda = 0.3;
    double alpha = 1.0;
    double beta = 0.5;
    double f0 = 0.0;

    // Closed forms with lambda, alpha, beta symbolic.
    static std::map<std::string, Expr> fields(const Expr& f0 = Expr());
    std::map<std::string, std::complex<double>> parameter_values() const;
};

// Substitutes the seed into every equation of the prolonged system; the
// returned residuals are exact.
std::vector<Expr> vacuum_seed_residuals();

Grid make_vacuum_grid(const VacuumSeed& seed, const GridSpec& spec = {});

// Max |F| over interior points using second-order central differences.
// `which` is F1 or F2.
double pde_residual(const Grid& g, const std::string& which, double alpha, double beta);

struct DriftResult {
    std::vector<double> density;  // I(t) per slice
    double max_drift = 0.0;       // max_t |I(t) - I(t0) - int flux dt|
};

// Conservation of (f_x, -f_t) on a grid carrying f.
DriftResult conserved_drift(const Grid& g);

// Observed orders log2(e_k / e_{k+1}) for successive refinements.
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace symflow
