#include "symflow/numcheck.hpp"

#include <cmath>

#include "symflow/parser.hpp"

namespace symflow {

std::map<std::string, Expr> VacuumSeed::fields(const Expr& f0) {
    Expr phase = parse("-I*lambda*x - (4*I*beta*lambda^3 + 2*I*alpha*lambda^2)*t");
    return {{"u", Expr()},
            {"v", Expr()},
            {"phi", exp(phase)},
            {"psi", exp(-phase)},
            {"f", parse("x + (12*beta*lambda^2 + 4*alpha*lambda)*t") + f0}};
}

std::map<std::string, std::complex<double>> VacuumSeed::parameter_values() const {
    return {{"lambda", lambda}, {"alpha", alpha}, {"beta", beta}};
}

std::vector<Expr> vacuum_seed_residuals() {
    PdeSystem sys = builtin_prolonged();
    auto seed = VacuumSeed::fields(Expr::parameter("c6"));
    SubstitutionRules rules;
    for (const auto& [name, e] : seed)
        for (int o = 0; o <= 3; ++o)
            for (int t = 0; t <= o; ++t) rules[Atom::jet(name, {t, o - t})] = total_derivative(e, DerivIndex{t, o - t});
    std::vector<Expr> out;
    for (const auto& eq : sys.equations) out.push_back(substitute(eq.expr, rules));
    return out;
}

Grid make_vacuum_grid(const VacuumSeed& seed, const GridSpec& spec) {
    return grid_from_exprs(spec, VacuumSeed::fields(Expr(Coefficient(mpq_class(seed.f0)))), seed.parameter_values());
}

double pde_residual(const Grid& g, const std::string& which, double alpha, double beta) {
    if (g.nx < 7 || g.nt < 7) throw GridError("pde_residual needs nx, nt >= 7");
    if (which != "F1" && which != "F2") throw Error("pde_residual: unknown equation " + which);
    const auto& U = g.field("u");
    const auto& V = g.field("v");
    const bool first = which == "F1";
    const auto& W = first ? U : V;  // the differentiated field
    const std::complex<double> I(0, 1);
    const double h = g.dx, k = g.dt;
    double worst = 0.0;
    for (int n = 1; n + 1 < g.nt; ++n)
        for (int i = 2; i + 2 < g.nx; ++i) {
            auto w = [&](int dn, int di) { return W[(n + dn) * g.nx + i + di]; };
            std::complex<double> u = U[n * g.nx + i], v = V[n * g.nx + i];
            std::complex<double> wt = (w(1, 0) - w(-1, 0)) / (2 * k);
            std::complex<double> wx = (w(0, 1) - w(0, -1)) / (2 * h);
            std::complex<double> wxx = (w(0, 1) - 2.0 * w(0, 0) + w(0, -1)) / (h * h);
            std::complex<double> wxxx = (w(0, 2) - 2.0 * w(0, 1) + 2.0 * w(0, -1) - w(0, -2)) / (2 * h * h * h);
            std::complex<double> r;
            if (first) r = I * wt + alpha * (wxx - 2.0 * u * u * v) + I * beta * (wxxx - 6.0 * u * v * wx);
            else r = I * wt - alpha * (wxx - 2.0 * v * v * u) + I * beta * (wxxx - 6.0 * u * v * wx);
            worst = std::max(worst, std::abs(r));
        }
    return worst;
}

namespace {

// Second-order derivative along a strided line, one-sided at the ends.
std::complex<double> line_derivative(const std::vector<std::complex<double>>& a, int base, int stride, int idx, int n,
                                     double h) {
    auto at = [&](int j) { return a[base + j * stride]; };
    if (idx == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2 * h);
    if (idx == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2 * h);
    return (at(idx + 1) - at(idx - 1)) / (2 * h);
}

}  // namespace

DriftResult conserved_drift(const Grid& g) {
    if (g.nx < 3 || g.nt < 3) throw GridError("conserved_drift needs nx, nt >= 3");
    const auto& f = g.field("f");
    DriftResult out;
    std::vector<std::complex<double>> I(g.nt), flux(g.nt);
    for (int n = 0; n < g.nt; ++n) {
        std::complex<double> s = 0;
        for (int i = 0; i < g.nx; ++i) {
            std::complex<double> fx = line_derivative(f, n * g.nx, 1, i, g.nx, g.dx);
            s += (i == 0 || i == g.nx - 1 ? 0.5 : 1.0) * fx;
        }
        I[n] = s * g.dx;
        // d/dt I = -[-f_t] from left to right boundary.
        std::complex<double> ft_right = line_derivative(f, g.nx - 1, g.nx, n, g.nt, g.dt);
        std::complex<double> ft_left = line_derivative(f, 0, g.nx, n, g.nt, g.dt);
        flux[n] = ft_right - ft_left;
        out.density.push_back(std::abs(I[n]));
    }
    std::complex<double> integral = 0;
    for (int n = 1; n < g.nt; ++n) {
        integral += 0.5 * g.dt * (flux[n - 1] + flux[n]);
        out.max_drift = std::max(out.max_drift, std::abs(I[n] - I[0] - integral));
    }
    return out;
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(std::log2(errors[k] / errors[k + 1]));
    return out;
}

}  // namespace symflow
