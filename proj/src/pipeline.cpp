#include "symflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "symflow/conslaw.hpp"
#include "symflow/grpflow.hpp"
#include "symflow/liealg.hpp"
#include "symflow/linsym.hpp"
#include "symflow/numcheck.hpp"
#include "symflow/random_expr.hpp"

namespace symflow {

namespace {

std::string brief(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string s = to_string(e);
    if (s.size() > 160) s = s.substr(0, 160) + "... (" + std::to_string(e.size()) + " terms)";
    return s;
}

CheckResult zero_check(const std::string& name, const Expr& residual) {
    return make_check(name, residual.is_zero(), "reduced residual " + brief(residual),
                      static_cast<double>(residual.size()));
}

Expr cross_derivative(const Closure& c, const std::string& name) {
    JetCoordinate jx{name, {0, 1}}, jt{name, {1, 0}};
    return c.reduce(total_derivative(c.reduced(jx), Direction::t)) - c.reduce(total_derivative(c.reduced(jt), Direction::x));
}

const std::vector<std::string> hirota_labels{"F1", "F2"};

SymmetryCandidate localized_characteristic() {
    SymmetryCandidate s;
    s.components = {{"u", parse("phi^2")},   {"v", parse("psi^2")}, {"phi", parse("phi*f")},
                    {"psi", parse("psi*f")}, {"f", parse("f^2")}};
    return s;
}

std::string join_residuals(const SymmetryCheck& r) {
    std::string out;
    for (std::size_t i = 0; i < r.labels.size(); ++i)
        out += (i ? ", " : "") + r.labels[i] + ": " + brief(r.residuals[i]);
    return out;
}

std::vector<CheckResult> family_checks(const std::string& title, const PdeSystem& sys, const VectorField& family,
                                       const std::vector<std::string>& labels) {
    std::vector<CheckResult> out;
    out.push_back(timed([&] {
        return make_check(title + " family is a symmetry", verify_family(sys, family, labels), "constants symbolic");
    }));
    // Doubling a single term must break the family, unless its constants occur
    // nowhere else (then the mutation only renames a constant).
    out.push_back(timed([&] {
        auto constants_of = [](const Expr& e) {
            std::set<Atom> out;
            for (const auto& a : atoms(e))
                if (a.kind() == AtomKind::Parameter && a.name().size() > 1 && a.name()[0] == 'c') out.insert(a);
            return out;
        };
        std::map<Atom, int> uses;
        for (const auto& [k, c] : family.coeffs)
            for (const auto& t : c.terms())
                for (const auto& a : constants_of(Expr(t.coeff) * monomial_expr(t.mono))) ++uses[a];
        std::vector<std::string> names;
        std::vector<std::future<bool>> jobs;
        int renamings = 0;
        for (const auto& [k, c] : family.coeffs) {
            const auto& terms = c.terms();
            for (std::size_t i = 0; i < terms.size(); ++i) {
                Expr term = Expr(terms[i].coeff) * monomial_expr(terms[i].mono);
                bool lone = true;
                for (const auto& a : constants_of(term)) lone = lone && uses[a] == 1;
                if (lone) {
                    ++renamings;
                    continue;
                }
                VectorField m = family;
                m.set(k, c + term);
                names.push_back(k + " term " + to_string(term));
                jobs.push_back(std::async(std::launch::async, [&sys, m, &labels] { return verify_family(sys, m, labels); }));
            }
        }
        std::vector<std::string> survived;
        for (std::size_t i = 0; i < jobs.size(); ++i)
            if (jobs[i].get()) survived.push_back(names[i]);
        std::string detail = std::to_string(names.size()) + " single-term mutations, " + std::to_string(renamings) +
                             " skipped as constant renamings";
        for (const auto& s : survived) detail += "; still symmetric: " + s;
        return make_check(title + " family mutation sensitivity", survived.empty() && !names.empty(), detail);
    }));
    return out;
}

std::vector<double> orders_of(const std::vector<double>& errs) { return observed_orders(errs); }

std::string format_orders(const std::vector<double>& errs) {
    std::ostringstream os;
    os << "errors";
    for (double e : errs) os << " " << e;
    os << "; orders";
    for (double o : orders_of(errs)) os << " " << o;
    return os.str();
}

bool orders_in_band(const std::vector<double>& errs) {
    auto orders = orders_of(errs);
    if (orders.empty()) return false;
    for (double o : orders)
        if (!(o > 1.7 && o < 2.3)) return false;
    return true;
}

const FormalLagrangian& lagrangian() {
    static const FormalLagrangian L = formal_lagrangian();
    return L;
}

bool same_system(const PdeSystem& a, const PdeSystem& b) {
    if (a.name != b.name || a.parameters != b.parameters || a.independents != b.independents) return false;
    if (a.dependents.size() != b.dependents.size() || a.equations.size() != b.equations.size() ||
        a.solved.size() != b.solved.size())
        return false;
    for (std::size_t i = 0; i < a.dependents.size(); ++i)
        if (a.dependents[i].name != b.dependents[i].name || a.dependents[i].max_order != b.dependents[i].max_order)
            return false;
    for (std::size_t i = 0; i < a.equations.size(); ++i)
        if (a.equations[i].label != b.equations[i].label || !(a.equations[i].expr == b.equations[i].expr)) return false;
    for (std::size_t i = 0; i < a.solved.size(); ++i)
        if (!(a.solved[i].lhs == b.solved[i].lhs) || !(a.solved[i].rhs == b.solved[i].rhs) ||
            a.solved[i].source != b.solved[i].source)
            return false;
    return true;
}

}  // namespace

std::vector<CheckResult> zero_curvature_checks(const PipelineOptions& o) {
    Closure c(builtin_prolonged(), o.max_order);
    std::vector<CheckResult> out;
    for (const char* n : {"phi", "psi", "f"}) {
        std::string what = std::string(n) == "f" ? "compatibility" : "zero curvature";
        out.push_back(timed([&] { return zero_check(what + " " + n + "_xt - " + n + "_tx", cross_derivative(c, n)); }));
    }
    return out;
}

std::vector<CheckResult> potential_law_checks(const PipelineOptions& o) {
    std::vector<CheckResult> out;
    Closure c(builtin_prolonged(), o.max_order);
    out.push_back(timed([&] { return zero_check("compatibility f_xt - f_tx", cross_derivative(c, "f")); }));
    out.push_back(timed([&] {
        AdjointSystem adj = adjoint_system(lagrangian(), o.max_order);
        auto r = verify_divergence(potential_conserved_vector(), adj, o.numeric_points, o.seed);
        return make_check("divergence of (f_x, -f_t)", r.holds && r.numeric_max < 1e-9,
                          "reduced " + brief(r.residual) + ", numeric max " + std::to_string(r.numeric_max),
                          r.numeric_max);
    }));
    return out;
}

std::vector<CheckResult> symmetry_checks(const std::string& family, const PipelineOptions& o) {
    static const std::vector<std::string> known{"nonlocal", "localized", "hirota", "prolonged", "all"};
    if (std::find(known.begin(), known.end(), family) == known.end()) throw Error("unknown family " + family);
    auto want = [&](const char* f) { return family == f || family == "all"; };
    std::vector<CheckResult> out;
    PdeSystem p = builtin_prolonged();
    Closure closure(p, o.max_order);
    if (want("nonlocal"))
        out.push_back(timed([&] {
            SymmetryCandidate s;
            s.components = {{"u", parse("phi^2")}, {"v", parse("psi^2")}};
            auto r = verify_symmetry(p, closure, s, hirota_labels);
            return make_check("nonlocal symmetry (phi^2, psi^2) of the Hirota equations", r.holds, join_residuals(r));
        }));
    if (want("localized"))
        out.push_back(timed([&] {
            auto r = verify_symmetry(p, closure, localized_characteristic());
            return make_check("localized symmetry on every prolonged equation", r.holds, join_residuals(r));
        }));
    if (want("hirota")) {
        auto c = family_checks("Hirota", builtin_hirota_lax(), hirota_family(), hirota_labels);
        out.insert(out.end(), c.begin(), c.end());
    }
    if (want("prolonged")) {
        auto c = family_checks("prolonged", p, prolonged_family(), {});
        out.insert(out.end(), c.begin(), c.end());
        out.push_back(timed([&] {
            bool holds = verify_family(p, prolonged_family_flipped_psi());
            return CheckResult{"prolonged family with psi coefficient (-2*c2*f + c1 - c5)*psi/2", Status::info, 0.0,
                               holds ? "verifies" : "fails; the sign-corrected coefficient (2*c2*f - c1 + c5)*psi/2 is used",
                               0.0};
        }));
    }
    return out;
}

std::vector<CheckResult> manifest_symmetry_checks(const Manifest& m, const PipelineOptions& o) {
    if (m.symmetry.empty()) throw Error("manifest has no [symmetry] section");
    SymmetryCandidate s;
    for (const auto& [dep, e] : m.symmetry) s.components[dep] = e;
    Closure closure(m.system, o.max_order);
    return {timed([&] {
        auto r = verify_symmetry(m.system, closure, s);
        return make_check("symmetry of " + m.system.name, r.holds, join_residuals(r));
    })};
}

std::vector<CheckResult> finite_transform_checks(const FlowRun& run, const PipelineOptions& o) {
    std::vector<CheckResult> out;
    if (run.group_law) {
        auto start = std::chrono::steady_clock::now();
        auto good = verify_flow_properties(closed_form_flow(), o.seed, o.numeric_points);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (auto c : good.checks) {
            c.seconds = secs / static_cast<double>(good.checks.size());
            out.push_back(c);
        }
        out.push_back(timed([&] {
            auto bad = verify_flow_properties(flipped_flow(), o.seed, o.numeric_points);
            return make_check("f -> f/(epsilon*f - 1) violates the group law", !bad.group_law_holds && !bad.ode_holds,
                              std::string("group law ") + (bad.group_law_holds ? "holds" : "fails") + ", epsilon-ODE " +
                                  (bad.ode_holds ? "holds" : "fails"));
        }));
    }
    VacuumSeed seed;
    std::vector<double> r1, r2, drift;
    out.push_back(timed([&] {
        for (int level : run.levels) {
            Grid g = map_solution(make_vacuum_grid(seed, GridSpec{}.refined(level)), run.epsilon);
            r1.push_back(pde_residual(g, "F1", seed.alpha, seed.beta));
            r2.push_back(pde_residual(g, "F2", seed.alpha, seed.beta));
            drift.push_back(conserved_drift(g).max_drift);
        }
        return make_check("transformed vacuum F1 residual order 2.0 +- 0.3", orders_in_band(r1), format_orders(r1),
                          r1.back());
    }));
    out.push_back(make_check("transformed vacuum F2 residual order 2.0 +- 0.3", orders_in_band(r2), format_orders(r2),
                             r2.back()));
    out.push_back(make_check("transformed vacuum (f_x, -f_t) drift order 2.0 +- 0.3", orders_in_band(drift),
                             format_orders(drift), drift.back()));
    return out;
}

std::vector<CheckResult> grid_checks(const Grid& g, double alpha, double beta) {
    std::vector<CheckResult> out;
    for (const char* f : {"F1", "F2"})
        if (g.has("u") && g.has("v"))
            out.push_back(timed([&] {
                double r = pde_residual(g, f, alpha, beta);
                return CheckResult{std::string(f) + " residual on grid", Status::info, r, "max interior |F|", 0.0};
            }));
    if (g.has("f"))
        out.push_back(timed([&] {
            auto d = conserved_drift(g);
            return CheckResult{"(f_x, -f_t) drift on grid", Status::info, d.max_drift, "max |I(t) - I(t0) - flux|", 0.0};
        }));
    return out;
}

std::vector<CheckResult> optimal_system_checks(const PipelineOptions& o, nlohmann::json* data) {
    std::vector<CheckResult> out;
    auto start = std::chrono::steady_clock::now();
    StructureTable t = structure_table(prolonged_generators(), generator_labels());
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string problems;
    for (const auto& p : t.problems) problems += p + "; ";
    int pairs = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j) ++pairs;
    CheckResult table = make_check("structure table closes", t.closed, std::to_string(pairs) + " pairs" + (problems.empty() ? "" : "; " + problems));
    table.seconds = secs;
    out.push_back(table);
    out.push_back(make_check("antisymmetry", t.antisymmetric));
    out.push_back(make_check("Jacobi identity", t.jacobi));
    out.push_back(make_check("[v1,v2] = v2", t.format_bracket(0, 1) == "v2", t.format_bracket(0, 1)));
    out.push_back(make_check("[v1,v3] = -v3", t.format_bracket(0, 2) == "-v3", t.format_bracket(0, 2)));
    out.push_back(make_check("[v2,v3] = -2*v1", t.format_bracket(1, 2) == "-2*v1", t.format_bracket(1, 2)));
    auto center = t.center();
    std::string cs;
    for (auto c : center) cs += (cs.empty() ? "" : ", ") + t.labels[c];
    out.push_back(make_check("v4, v5, v6 are central", center == std::vector<std::size_t>{3, 4, 5}, "center: " + cs));
    if (data) {
        nlohmann::json brackets = nlohmann::json::object();
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = i + 1; j < t.size(); ++j)
                brackets["[" + t.labels[i] + "," + t.labels[j] + "]"] = t.format_bracket(i, j);
        (*data)["structure_constants"] = brackets;
    }
    start = std::chrono::steady_clock::now();
    auto rep = verify_optimal_system(o.seed, o.random_cases);
    secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto c : rep.checks) {
        c.seconds = secs / static_cast<double>(rep.checks.size());
        out.push_back(c);
    }
    if (data) {
        nlohmann::json samples = nlohmann::json::array();
        for (const auto& n : rep.samples) {
            nlohmann::json s = {{"start", nlohmann::json::array()}, {"representative", n.representative}};
            for (const auto& a : n.start) s["start"].push_back(a.to_string());
            if (n.alpha) s["alpha"] = n.alpha->to_string();
            nlohmann::json steps = nlohmann::json::array();
            for (const auto& st : n.steps) steps.push_back({{"generator", generator_labels()[st.generator]}, {"epsilon", st.epsilon.to_string()}});
            s["steps"] = steps;
            samples.push_back(s);
        }
        (*data)["normalizations"] = samples;
    }
    return out;
}

std::vector<CheckResult> conservation_checks(const std::string& generator, const PipelineOptions& o) {
    auto gens = prolonged_generators();
    auto labels = generator_labels();
    std::vector<std::pair<std::string, VectorField>> todo;
    for (std::size_t i = 0; i < gens.size(); ++i)
        if (generator == "all" || generator == labels[i]) todo.emplace_back(labels[i], gens[i]);
    if (generator == "all" || generator == "family") todo.emplace_back("family", prolonged_family());
    if (todo.empty()) throw Error("unknown generator " + generator);
    AdjointSystem adj = adjoint_system(lagrangian(), o.max_order);
    std::vector<std::future<CheckResult>> jobs;
    for (const auto& [name, vf] : todo)
        jobs.push_back(std::async(std::launch::async, [&, name = name, vf = vf] {
            return timed([&] {
                auto r = verify_divergence(conserved_vector(vf, lagrangian()), adj, o.numeric_points, o.seed);
                std::ostringstream d;
                d << "reduced " << brief(r.residual) << ", numeric max " << r.numeric_max << " at " << o.numeric_points
                  << " points, order " << r.max_order;
                return make_check("conserved vector of " + name, r.holds && r.numeric_max < 1e-9, d.str(), r.numeric_max);
            });
        }));
    std::vector<CheckResult> out;
    for (auto& j : jobs) out.push_back(j.get());
    if (generator == "all" || generator == "v3")
        out.push_back(timed([&] {
            auto cv = conserved_vector(gens[2], lagrangian());
            Expr dt = adj.combined->reduce(cv.Tt - Expr::jet("m8")), dx = adj.combined->reduce(cv.Tx - Expr::jet("m7"));
            bool nonzero = assess_triviality(cv, adj) != "vanishes on-shell";
            return make_check("v3 conserved vector equals (m8, m7)", dt.is_zero() && dx.is_zero() && nonzero,
                              "difference (" + brief(dt) + ", " + brief(dx) + "), " +
                                  (nonzero ? "nonzero on-shell" : "vanishes on-shell"));
        }));
    std::string iso;
    for (const auto& s : adj.solved) iso += (iso.empty() ? "" : ", ") + to_string(s.lhs) + " from " + s.source;
    out.push_back({"adjoint solved forms", Status::info, 0.0, iso, 0.0});
    return out;
}

std::vector<CheckResult> diagnose_conserved_vector(const std::string& generator, const std::string& transcription,
                                                   const PipelineOptions& o) {
    auto gens = prolonged_generators();
    auto labels = generator_labels();
    auto it = std::find(labels.begin(), labels.end(), generator);
    if (it == labels.end()) throw Error("diagnosis needs a single generator v1..v6");
    auto cv = conserved_vector(gens[static_cast<std::size_t>(it - labels.begin())], lagrangian());
    AdjointSystem adj = adjoint_system(lagrangian(), o.max_order);
    SymbolTable symbols = SymbolTable::standard();
    std::istringstream in(transcription);
    std::string line;
    std::vector<CheckResult> out;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key != "Tt" && key != "Tx") throw Error("transcription keys are Tt and Tx, got " + key);
        Expr given = parse(line.substr(eq + 1), symbols);
        Expr ours = key == "Tt" ? cv.Tt : cv.Tx;
        Expr diff = adj.combined->reduce(ours - given);
        out.push_back({key + " of " + generator + " against transcription", Status::info,
                       static_cast<double>(diff.size()), diff.is_zero() ? "matches on-shell" : "differs: " + brief(diff), 0.0});
    }
    return out;
}

std::vector<CheckResult> kernel_property_checks(const PipelineOptions& o) {
    std::mt19937_64 rng(o.seed);
    std::vector<CheckResult> out;
    const int n = o.random_cases;
    auto count = [&](const std::string& name, const std::function<bool()>& trial) {
        return timed([&] {
            int failures = 0;
            for (int k = 0; k < n; ++k) failures += trial() ? 0 : 1;
            return make_check(name, failures == 0, std::to_string(failures) + " failures in " + std::to_string(n) + " cases",
                              failures);
        });
    };
    out.push_back(count("total derivatives commute", [&] {
        Expr e = random_polynomial(rng, 4, 2);
        return (total_derivative(total_derivative(e, Direction::x), Direction::t) -
                total_derivative(total_derivative(e, Direction::t), Direction::x))
            .is_zero();
    }));
    out.push_back(count("Euler operator annihilates divergences", [&] {
        Expr A = random_polynomial(rng, 3, 2), B = random_polynomial(rng, 3, 2);
        Expr div = total_derivative(A, Direction::x) + total_derivative(B, Direction::t);
        for (const char* w : {"u", "v", "phi", "psi", "f"})
            if (!euler_lagrange(div, w).is_zero()) return false;
        return true;
    }));
    out.push_back(count("canonicalize is idempotent", [&] {
        Expr a = random_polynomial(rng), b = random_polynomial(rng);
        Expr c = canonicalize(a * b + reciprocal(b + Expr(7)));
        return canonicalize(c) == c && Expr::compare(canonicalize(c), c) == 0;
    }));
    out.push_back(count("print/parse round trip", [&] {
        Expr e = random_polynomial(rng) * reciprocal(random_polynomial(rng, 2, 1) + Expr(3));
        return Expr::compare(parse(to_string(e)), e) == 0;
    }));
    out.push_back(timed([&] {
        int total = 0, failures = 0;
        for (const auto& sys : builtin_corpus()) {
            SymbolTable symbols = sys.symbols();
            auto trip = [&](const Expr& e) {
                ++total;
                if (Expr::compare(parse(to_string(e), symbols), e) != 0) ++failures;
            };
            for (const auto& eq : sys.equations) trip(eq.expr);
            for (const auto& s : sys.solved) trip(s.rhs);
        }
        return make_check("corpus print/parse round trip", failures == 0,
                          std::to_string(failures) + " failures in " + std::to_string(total) + " expressions", failures);
    }));
    return out;
}

std::vector<CheckResult> corpus_checks(const PipelineOptions&) {
    std::vector<CheckResult> out;
    for (const auto& sys : builtin_corpus())
        out.push_back(timed([&] {
            std::string text = emit_manifest(sys);
            Manifest m = parse_manifest(text);
            bool same = same_system(m.system, sys) && emit_manifest(m.system) == text;
            return make_check("manifest round trip " + sys.name, same, std::to_string(sys.equations.size()) + " equations");
        }));
    return out;
}

const std::vector<Criterion>& acceptance_criteria() {
    static const std::vector<Criterion> list{
        {1, "zero curvature",
         [](const PipelineOptions& o) {
             auto c = zero_curvature_checks(o);
             c.pop_back();
             return c;
         }},
        {2, "f compatibility and (f_x, -f_t)", potential_law_checks},
        {3, "nonlocal symmetry", [](const PipelineOptions& o) { return symmetry_checks("nonlocal", o); }},
        {4, "localization", [](const PipelineOptions& o) { return symmetry_checks("localized", o); }},
        {5, "symmetry families",
         [](const PipelineOptions& o) {
             auto a = symmetry_checks("hirota", o);
             auto b = symmetry_checks("prolonged", o);
             a.insert(a.end(), b.begin(), b.end());
             return a;
         }},
        {6, "finite flow", [](const PipelineOptions& o) { return finite_transform_checks(FlowRun{}, o); }},
        {7, "Lie algebra and optimal system", [](const PipelineOptions& o) { return optimal_system_checks(o); }},
        {8, "conservation laws", [](const PipelineOptions& o) { return conservation_checks("all", o); }},
        {9, "kernel properties",
         [](const PipelineOptions& o) {
             auto a = kernel_property_checks(o);
             auto b = corpus_checks(o);
             a.insert(a.end(), b.begin(), b.end());
             return a;
         }},
    };
    return list;
}

}  // namespace symflow
