#include "symflow/liealg.hpp"

#include <deque>
#include <random>

#include "symflow/parser.hpp"

namespace symflow {

VectorField commutator(const VectorField& a, const VectorField& b) {
    for (const auto* vf : {&a, &b})
        for (const auto& [k, c] : vf->coeffs)
            for (const auto& j : jet_coordinates(c))
                if (j.index.order() > 0) throw Error("commutator: coefficient of d/d" + k + " involves " + to_string(j));
    VectorField out;
    std::set<std::string> keys;
    for (const auto& [k, c] : a.coeffs) keys.insert(k);
    for (const auto& [k, c] : b.coeffs) keys.insert(k);
    for (const auto& k : keys) out.set(k, a.apply(b.coefficient(k)) - b.apply(a.coefficient(k)));
    return out;
}

std::vector<VectorField> prolonged_generators() {
    std::vector<VectorField> v(6);
    v[0].set("phi", parse("phi/2")).set("psi", parse("psi/2")).set("f", parse("f"));
    v[1].set("u", parse("phi^2")).set("v", parse("psi^2")).set("phi", parse("phi*f")).set("psi", parse("psi*f"));
    v[1].set("f", parse("f^2"));
    v[2].set("f", Expr(1));
    v[3].set("u", parse("u")).set("v", parse("-v")).set("phi", parse("phi/2")).set("psi", parse("-psi/2"));
    v[4].set("t", Expr(1));
    v[5].set("x", Expr(1));
    return v;
}

std::vector<std::string> generator_labels() { return {"v1", "v2", "v3", "v4", "v5", "v6"}; }

namespace {

bool is_split_atom(const Atom& a) { return a.kind() == AtomKind::Independent || a.kind() == AtomKind::Jet; }

// Solves rows * c = rhs exactly; nullopt when inconsistent. Free unknowns are set to zero.
std::optional<std::vector<Coefficient>> solve_linear(std::vector<std::vector<Coefficient>> rows, std::vector<Coefficient> rhs,
                                                     std::size_t n) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][col].is_zero()) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        std::swap(rhs[p], rhs[r]);
        Coefficient inv = rows[r][col].inverse();
        for (auto& x : rows[r]) x *= inv;
        rhs[r] *= inv;
        for (std::size_t q = 0; q < rows.size(); ++q) {
            if (q == r || rows[q][col].is_zero()) continue;
            Coefficient m = rows[q][col];
            for (std::size_t c = 0; c < n; ++c) rows[q][c] -= m * rows[r][c];
            rhs[q] -= m * rhs[r];
        }
        pivots.push_back(col);
        ++r;
    }
    for (std::size_t q = r; q < rows.size(); ++q)
        if (!rhs[q].is_zero()) return std::nullopt;
    std::vector<Coefficient> out(n);
    for (std::size_t k = 0; k < pivots.size(); ++k) out[pivots[k]] = rhs[k];
    return out;
}

}  // namespace

std::optional<std::vector<Coefficient>> decompose(const VectorField& w, const std::vector<VectorField>& basis) {
    // One row per (coordinate, monomial) pair.
    std::map<std::pair<std::string, Monomial>, std::size_t> row_of;
    std::vector<std::vector<Coefficient>> rows;
    std::vector<Coefficient> rhs;
    const std::size_t n = basis.size();
    auto row = [&](const std::string& k, const Monomial& m) -> std::size_t {
        auto key = std::make_pair(k, m);
        auto it = row_of.find(key);
        if (it != row_of.end()) return it->second;
        rows.emplace_back(n);
        rhs.emplace_back();
        return row_of.emplace(key, rows.size() - 1).first->second;
    };
    auto constant = [](const Expr& e) -> std::optional<Coefficient> { return e.constant_value(); };
    for (std::size_t j = 0; j < n; ++j)
        for (const auto& [k, c] : basis[j].coeffs)
            for (const auto& [m, rest] : split_by(c, is_split_atom)) {
                auto v = constant(rest);
                if (!v) throw Error("decompose: basis coefficients must have constant weights");
                rows[row(k, m)][j] += *v;
            }
    for (const auto& [k, c] : w.coeffs)
        for (const auto& [m, rest] : split_by(c, is_split_atom)) {
            auto v = constant(rest);
            if (!v) return std::nullopt;
            rhs[row(k, m)] += *v;
        }
    return solve_linear(std::move(rows), std::move(rhs), n);
}

std::vector<Expr> StructureTable::bracket(const std::vector<Expr>& a, const std::vector<Expr>& b) const {
    std::vector<Expr> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < size(); ++j) {
            if (b[j].is_zero()) continue;
            Expr ab = a[i] * b[j];
            for (std::size_t k = 0; k < size(); ++k)
                if (!constants[i][j][k].is_zero()) out[k] += ab.scaled(constants[i][j][k]);
        }
    }
    return out;
}

std::vector<std::size_t> StructureTable::center() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j) {
        bool central = true;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t k = 0; k < size(); ++k) central = central && constants[i][j][k].is_zero();
        if (central) out.push_back(j);
    }
    return out;
}

std::string StructureTable::format_bracket(std::size_t i, std::size_t j) const {
    Expr e;
    for (std::size_t k = 0; k < size(); ++k) e += Expr(constants[i][j][k]) * Expr::parameter(labels[k]);
    return to_string(e);
}

StructureTable structure_table(const std::vector<VectorField>& basis, const std::vector<std::string>& labels) {
    StructureTable t;
    t.labels = labels;
    const std::size_t n = basis.size();
    t.constants.assign(n, std::vector<std::vector<Coefficient>>(n, std::vector<Coefficient>(n)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            VectorField br = commutator(basis[i], basis[j]);
            auto c = decompose(br, basis);
            if (!c) {
                t.closed = false;
                t.problems.push_back("[" + labels[i] + "," + labels[j] + "] = " + to_string(br) + " is outside the span");
                continue;
            }
            t.constants[i][j] = *c;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (t.constants[i][j][k] != -t.constants[j][i][k]) {
                    t.antisymmetric = false;
                    t.problems.push_back("antisymmetry fails for " + labels[i] + "," + labels[j]);
                }
    auto unit = [&](std::size_t i) {
        std::vector<Expr> e(n);
        e[i] = Expr(1);
        return e;
    };
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                auto x = t.bracket(unit(a), t.bracket(unit(b), unit(c)));
                auto y = t.bracket(unit(b), t.bracket(unit(c), unit(a)));
                auto z = t.bracket(unit(c), t.bracket(unit(a), unit(b)));
                for (std::size_t k = 0; k < n; ++k)
                    if (!(x[k] + y[k] + z[k]).is_zero()) {
                        t.jacobi = false;
                        t.problems.push_back("Jacobi fails for " + labels[a] + "," + labels[b] + "," + labels[c]);
                    }
            }
    return t;
}

std::vector<Expr> adjoint(const StructureTable& table, std::size_t i, const std::vector<Expr>& w, const Expr& eps) {
    const std::size_t n = table.size();
    std::vector<Expr> v(n);
    v[i] = Expr(1);
    auto ad = [&](const std::vector<Expr>& x) { return table.bracket(v, x); };
    std::vector<Expr> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (w[j].is_zero()) continue;
        std::vector<Expr> e(n);
        e[j] = Expr(1);
        std::vector<Expr> img(n);
        std::vector<Expr> first = ad(e);
        // Eigenvector: [v, e] = c e.
        bool eigen = true;
        std::optional<Coefficient> c;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) {
                c = first[k].constant_value();
                eigen = eigen && c.has_value();
            } else {
                eigen = eigen && first[k].is_zero();
            }
        }
        if (eigen && c && !c->is_zero()) {
            img[j] = exp(-(Expr(*c) * eps));
        } else {
            std::vector<Expr> term = e;
            Expr factor(1);
            bool done = false;
            for (int m = 0; m <= 12; ++m) {
                bool zero = true;
                for (const auto& x : term) zero = zero && x.is_zero();
                if (zero) {
                    done = true;
                    break;
                }
                for (std::size_t k = 0; k < n; ++k) img[k] += factor * term[k];
                term = ad(term);
                factor = factor * (-eps) * Expr::rational(1, m + 1);
            }
            if (!done) throw AdjointError("adjoint series neither terminates nor is diagonal");
        }
        for (std::size_t k = 0; k < n; ++k) out[k] += w[j] * img[k];
    }
    return out;
}

Coefficient killing_invariant(const std::vector<Coefficient>& a) {
    return Coefficient(2) * (a[0] * a[0] - Coefficient(4) * a[1] * a[2]);
}

namespace {

std::optional<std::pair<std::string, std::optional<Coefficient>>> representative_of(const std::vector<Coefficient>& a) {
    bool z1 = a[0].is_zero(), z2 = a[1].is_zero(), z3 = a[2].is_zero();
    if (!z1 && z2 && z3) return std::make_pair(std::string("v1"), std::optional<Coefficient>());
    if (z1 && z2 && !z3) return std::make_pair(std::string("v3"), std::optional<Coefficient>());
    if (z1 && !z2) return std::make_pair(std::string("v2+alpha*v3"), std::optional<Coefficient>(a[2] / a[1]));
    return std::nullopt;
}

// Case condition attached to a representative.
bool case_condition(const std::string& rep, const std::vector<Coefficient>& a) {
    if (rep == "v1") return !a[0].is_zero();
    if (rep == "v3") return !a[2].is_zero();
    return !a[1].is_zero() && !a[2].is_zero();
}

bool any_case(const std::vector<Coefficient>& a) {
    return case_condition("v1", a) || case_condition("v3", a) || case_condition("v2+alpha*v3", a);
}

}  // namespace

Normalization normalize_element(const StructureTable& table, const std::vector<Coefficient>& a, int depth) {
    struct Node {
        std::vector<Coefficient> state;
        std::vector<OrbitStep> steps;
    };
    Normalization best;
    best.start = a;
    std::optional<Normalization> fallback;
    Expr s = Expr::parameter("epsilon");
    Atom sa = Atom::parameter("epsilon");
    std::deque<Node> queue{{a, {}}};
    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        if (auto rep = representative_of(node.state)) {
            Normalization n{a, node.steps, node.state, rep->first, rep->second, true};
            if (case_condition(rep->first, a) || !any_case(a)) return n;
            if (!fallback) fallback = n;
        }
        if (static_cast<int>(node.steps.size()) >= depth) continue;
        std::vector<Expr> w;
        for (const auto& c : node.state) w.emplace_back(c);
        for (std::size_t g : {std::size_t(2), std::size_t(1)}) {
            auto img = adjoint(table, g, w, s);
            for (std::size_t k = 0; k < img.size(); ++k) {
                auto coeffs = polynomial_coefficients(img[k], sa);
                if (coeffs.size() > 2 || !coeffs.count(1) || coeffs.rbegin()->first != 1) continue;
                auto c1 = coeffs[1].constant_value();
                auto c0 = coeffs.count(0) ? coeffs[0].constant_value() : std::optional<Coefficient>(Coefficient());
                if (!c1 || !c0 || c0->is_zero()) continue;
                Coefficient eps = -(*c0) / (*c1);
                Node next{{}, node.steps};
                for (const auto& e : img) next.state.push_back(*substitute(e, {{sa, Expr(eps)}}).constant_value());
                next.steps.push_back({g, eps});
                queue.push_back(std::move(next));
            }
        }
    }
    if (fallback) return *fallback;
    return best;
}

OptimalSystemReport verify_optimal_system(std::uint64_t seed, int samples) {
    OptimalSystemReport rep;
    auto gens = prolonged_generators();
    StructureTable sub = structure_table({gens[0], gens[1], gens[2]}, {"v1", "v2", "v3"});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9), zero(0, 4);
    int normalized = 0, consistent = 0, uncovered = 0, invariant_ok = 0;
    std::map<std::string, int> reached;
    for (int k = 0; k < samples; ++k) {
        std::vector<Coefficient> a(3);
        do {
            for (auto& x : a) x = zero(rng) == 0 ? Coefficient() : Coefficient::rational(num(rng), den(rng));
        } while (a[0].is_zero() && a[1].is_zero() && a[2].is_zero());
        Normalization n = normalize_element(sub, a);
        if (n.found) {
            ++normalized;
            ++reached[n.representative];
            if (!any_case(a)) ++uncovered;
            else if (case_condition(n.representative, a)) ++consistent;
            // The Killing form is invariant along every step.
            bool ok = killing_invariant(n.start) == killing_invariant(n.end);
            std::vector<Coefficient> cur = n.start;
            for (const auto& st : n.steps) {
                std::vector<Expr> w(cur.begin(), cur.end());
                auto img = adjoint(sub, st.generator, w, Expr(st.epsilon));
                for (std::size_t i = 0; i < 3; ++i) cur[i] = *img[i].constant_value();
                ok = ok && killing_invariant(cur) == killing_invariant(n.start);
            }
            ok = ok && cur == n.end;
            if (ok) ++invariant_ok;
        }
        rep.samples.push_back(std::move(n));
    }
    std::string counts;
    for (const auto& [r, c] : reached) counts += (counts.empty() ? "" : ", ") + r + ": " + std::to_string(c);
    rep.checks.push_back(make_check("elements normalized within 3 adjoint maps", normalized == samples,
                                    std::to_string(normalized) + "/" + std::to_string(samples) + " (" + counts + ")"));
    rep.checks.push_back(make_check("representative matches case condition", consistent + uncovered == normalized,
                                    std::to_string(consistent) + " consistent, " + std::to_string(uncovered) +
                                        " outside every case label"));
    rep.checks.push_back(make_check("Killing form constant along orbits", invariant_ok == normalized,
                                    std::to_string(invariant_ok) + "/" + std::to_string(normalized)));
    // Representatives are separated by the sign of the Killing form:
    // v1 > 0, v3 = 0, v2 + alpha v3 < 0 exactly when alpha > 0.
    Coefficient k1 = killing_invariant({1, 0, 0}), k3 = killing_invariant({0, 0, 1});
    Coefficient kpos = killing_invariant({0, 1, 1}), kneg = killing_invariant({0, 1, -1}), kzero = killing_invariant({0, 1, 0});
    bool separated = k1.re() > 0 && k3.is_zero() && kpos.re() < 0;
    rep.checks.push_back(make_check("v1, v3, v2+alpha*v3 (alpha>0) pairwise inequivalent", separated,
                                    "Killing signs +, 0, -"));
    Status note = Status::info;
    rep.checks.push_back({"v2+alpha*v3 with alpha<0 or alpha=0",
                          note,
                          0.0,
                          std::string("Killing ") + (kneg.re() > 0 ? "+" : "?") + " and " + (kzero.is_zero() ? "0" : "?") +
                              ": equivalent to v1 and v3 respectively",
                          0.0});
    return rep;
}

}  // namespace symflow
