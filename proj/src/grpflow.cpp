#include "symflow/grpflow.hpp"

#include <cmath>
#include <random>

#include "symflow/parser.hpp"

namespace symflow {

FlowMap FlowMap::at(const Expr& e) const {
    FlowMap out;
    out.epsilon = epsilon;
    SubstitutionRules r{{epsilon, e}};
    for (const auto& [k, v] : rules) out.rules[k] = substitute(v, r);
    return out;
}

FlowMap FlowMap::after(const FlowMap& other) const {
    SubstitutionRules r;
    for (const auto& [k, v] : other.rules) r[Atom::jet(k)] = v;
    FlowMap out;
    out.epsilon = epsilon;
    for (const auto& [k, v] : rules) out.rules[k] = substitute(v, r);
    return out;
}

VectorField localized_generator() {
    VectorField v;
    v.set("u", parse("phi^2")).set("v", parse("psi^2")).set("phi", parse("phi*f")).set("psi", parse("psi*f"));
    v.set("f", parse("f^2"));
    return v;
}

FlowMap closed_form_flow() {
    FlowMap m;
    m.rules = {{"u", parse("u + epsilon*phi^2/(1 - epsilon*f)")},
               {"v", parse("v + epsilon*psi^2/(1 - epsilon*f)")},
               {"phi", parse("phi/(1 - epsilon*f)")},
               {"psi", parse("psi/(1 - epsilon*f)")},
               {"f", parse("f/(1 - epsilon*f)")}};
    return m;
}

FlowMap flipped_flow() {
    FlowMap m;
    m.rules = {{"u", parse("(epsilon*f*u - epsilon*phi^2 - u)/(epsilon*f - 1)")},
               {"v", parse("(epsilon*f*v - epsilon*psi^2 - v)/(epsilon*f - 1)")},
               {"phi", parse("phi/(epsilon*f - 1)")},
               {"psi", parse("psi/(epsilon*f - 1)")},
               {"f", parse("f/(epsilon*f - 1)")}};
    return m;
}

const std::array<std::string, 5>& flow_variables() {
    static const std::array<std::string, 5> names{"u", "v", "phi", "psi", "f"};
    return names;
}

namespace {

FlowState rhs(const FlowState& s) {
    return {s[2] * s[2], s[3] * s[3], s[2] * s[4], s[3] * s[4], s[4] * s[4]};
}

FlowState axpy(const FlowState& a, std::complex<double> h, const FlowState& k) {
    FlowState r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + h * k[i];
    return r;
}

}  // namespace

FlowState ivp_oracle(const FlowState& initial, double epsilon, int steps) {
    if (steps < 1) throw Error("ivp_oracle needs at least one step");
    const std::complex<double> f0 = initial[4];
    auto guard = [&](double e) {
        if (std::abs(1.0 - e * f0) < pole_threshold) throw PoleError("flow path reaches the pole 1 - epsilon*f = 0");
    };
    guard(0.0);
    FlowState s = initial;
    double h = epsilon / steps;
    for (int n = 0; n < steps; ++n) {
        guard(h * n + 0.5 * h);
        guard(h * (n + 1));
        FlowState k1 = rhs(s);
        FlowState k2 = rhs(axpy(s, h / 2, k1));
        FlowState k3 = rhs(axpy(s, h / 2, k2));
        FlowState k4 = rhs(axpy(s, h, k3));
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return s;
}

FlowState apply_flow(const FlowMap& flow, const FlowState& s, double epsilon) {
    if (std::abs(1.0 - epsilon * s[4]) < pole_threshold) throw PoleError("state lies on the pole 1 - epsilon*f = 0");
    Assignment a{{flow.epsilon, epsilon}};
    for (std::size_t i = 0; i < s.size(); ++i) a[Atom::jet(flow_variables()[i])] = s[i];
    FlowState out;
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = eval_numeric(flow.rules.at(flow_variables()[i]), a);
    return out;
}

FlowProperties verify_flow_properties(const FlowMap& flow, std::uint64_t seed, int samples, double tolerance) {
    FlowProperties out;
    VectorField gen = localized_generator();

    // d(rule)/d(eps) = generator coefficient composed with the flow.
    SubstitutionRules compose;
    for (const auto& [k, v] : flow.rules) compose[Atom::jet(k)] = v;
    std::string bad;
    for (const auto& name : flow_variables()) {
        Expr lhs = diff(flow.rules.at(name), flow.epsilon);
        Expr rhs = substitute(gen.coefficient(name), compose);
        if (!(lhs - rhs).is_zero()) bad += (bad.empty() ? "" : ",") + name;
    }
    out.ode_holds = bad.empty();
    out.checks.push_back(make_check("flow ODE in epsilon", out.ode_holds, bad.empty() ? "all five rules" : "fails for " + bad));

    Expr e1 = Expr::parameter("epsilon1"), e2 = Expr::parameter("epsilon2");
    FlowMap composed = flow.at(e1).after(flow.at(e2));
    FlowMap direct = flow.at(e1 + e2);
    bad.clear();
    for (const auto& name : flow_variables())
        if (!(composed.rules.at(name) - direct.rules.at(name)).is_zero()) bad += (bad.empty() ? "" : ",") + name;
    out.group_law_holds = bad.empty();
    out.checks.push_back(make_check("group law", out.group_law_holds, bad.empty() ? "all five rules" : "fails for " + bad));

    bad.clear();
    for (const auto& name : flow_variables()) {
        Expr first = substitute(diff(flow.rules.at(name), flow.epsilon), {{flow.epsilon, Expr(0)}});
        Expr ident = substitute(flow.rules.at(name), {{flow.epsilon, Expr(0)}});
        if (!(first - gen.coefficient(name)).is_zero() || ident != Expr::jet(name)) bad += (bad.empty() ? "" : ",") + name;
    }
    out.infinitesimal_holds = bad.empty();
    out.checks.push_back(make_check("identity and first-order term", out.infinitesimal_holds,
                                    bad.empty() ? "matches the localized generator" : "fails for " + bad));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < samples; ++k) {
        FlowState s;
        for (auto& z : s) z = {uni(rng), uni(rng)};
        double eps = 0.4 * uni(rng);  // |eps f| < 0.6
        FlowState a = ivp_oracle(s, eps, 400);
        FlowState b = apply_flow(flow, s, eps);
        for (std::size_t i = 0; i < s.size(); ++i) out.oracle_max_error = std::max(out.oracle_max_error, std::abs(a[i] - b[i]));
    }
    out.checks.push_back(make_check("RK4 oracle agreement", out.oracle_max_error < tolerance,
                                    std::to_string(samples) + " random states", out.oracle_max_error));
    return out;
}

Grid map_solution(const Grid& g, double epsilon, const FlowMap& flow) {
    g.validate();
    const auto& f = g.field("f");
    for (std::size_t p = 0; p < f.size(); ++p)
        if (std::abs(1.0 - epsilon * f[p]) < pole_threshold)
            throw PoleError("pole 1 - epsilon*f = 0 at grid point " + std::to_string(p));
    Grid out = g.same_shape();
    std::vector<Expr> rules;
    for (const auto& name : flow_variables()) {
        out.fields[name].resize(f.size());
        rules.push_back(flow.rules.at(name));
    }
    Assignment a{{flow.epsilon, epsilon}};
    for (std::size_t p = 0; p < f.size(); ++p) {
        for (const auto& name : flow_variables()) a[Atom::jet(name)] = g.field(name)[p];
        for (std::size_t i = 0; i < rules.size(); ++i) out.fields[flow_variables()[i]][p] = eval_numeric(rules[i], a);
    }
    return out;
}

}  // namespace symflow
