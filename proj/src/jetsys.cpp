#include "symflow/jetsys.hpp"

#include <algorithm>
#include <sstream>

namespace symflow {

bool PdeSystem::has_dependent(const std::string& n) const {
    return std::any_of(dependents.begin(), dependents.end(), [&](const DependentDecl& d) { return d.name == n; });
}

std::vector<std::string> PdeSystem::dependent_names() const {
    std::vector<std::string> out;
    for (const auto& d : dependents) out.push_back(d.name);
    return out;
}

const Equation& PdeSystem::equation(const std::string& label) const {
    for (const auto& e : equations)
        if (e.label == label) return e;
    throw Error("system " + name + " has no equation " + label);
}

std::vector<std::string> PdeSystem::equation_labels() const {
    std::vector<std::string> out;
    for (const auto& e : equations) out.push_back(e.label);
    return out;
}

SymbolTable PdeSystem::symbols() const {
    SymbolTable s;
    for (const auto& d : dependents) s.dependents.insert(d.name);
    for (const auto& p : parameters) s.parameters.insert(p);
    return s;
}

void PdeSystem::validate() const {
    Closure closure(solved);
    for (const auto& r : solved) {
        if (!has_dependent(r.lhs.name)) throw Error("solved form for undeclared dependent " + r.lhs.name);
        for (const auto& j : jet_coordinates(r.rhs))
            if (closure.is_eliminable(j))
                throw Error("right-hand side of " + to_string(r.lhs) + " contains eliminable " + to_string(j));
    }
}

// ---- Built-in corpus --------------------------------------------------------

Expr lax_a() {
    return parse("-4*beta*I*lambda^3 - 2*alpha*I*lambda^2 - 2*beta*I*u*v*lambda - alpha*I*u*v"
                 " + beta*(v*Diff(u,x) - u*Diff(v,x))");
}

Expr lax_b() {
    return parse("4*beta*u*lambda^2 + (2*beta*I*Diff(u,x) + 2*alpha*u)*lambda + alpha*I*Diff(u,x)"
                 " - beta*(Diff(u,x,x) - 2*u^2*v)");
}

Expr lax_c() {
    return parse("4*beta*v*lambda^2 - (2*beta*I*Diff(v,x) - 2*alpha*v)*lambda - alpha*I*Diff(v,x)"
                 " - beta*(Diff(v,x,x) - 2*v^2*u)");
}

Expr f_t_rhs() {
    return parse("-beta*phi^2*Diff(v,x) + 12*beta*lambda^2*phi*psi + 4*lambda*alpha*phi*psi - beta*psi^2*Diff(u,x)"
                 " + 2*beta*phi*psi*u*v + 4*I*lambda*beta*psi^2*u - 4*I*lambda*beta*phi^2*v + I*alpha*psi^2*u"
                 " - I*alpha*phi^2*v");
}

namespace {

void add(PdeSystem& sys, const std::string& label, const JetCoordinate& lhs, const Expr& rhs, const Expr& eq) {
    sys.equations.push_back({label, eq});
    sys.solved.push_back({lhs, rhs, label});
}

JetCoordinate jet(const char* text) { return parse_jet(text); }

}  // namespace

PdeSystem builtin_hirota() {
    PdeSystem sys;
    sys.name = "hirota";
    sys.dependents = {{"u", 3}, {"v", 3}};
    sys.parameters = {"alpha", "beta"};
    add(sys, "F1", jet("Diff(u,t)"), parse("I*alpha*(Diff(u,x,x) - 2*u^2*v) - beta*(Diff(u,x,x,x) - 6*u*v*Diff(u,x))"),
        parse("I*Diff(u,t) + alpha*(Diff(u,x,x) - 2*u^2*v) + I*beta*(Diff(u,x,x,x) - 6*u*v*Diff(u,x))"));
    add(sys, "F2", jet("Diff(v,t)"), parse("-I*alpha*(Diff(v,x,x) - 2*v^2*u) - beta*(Diff(v,x,x,x) - 6*u*v*Diff(v,x))"),
        parse("I*Diff(v,t) - alpha*(Diff(v,x,x) - 2*v^2*u) + I*beta*(Diff(v,x,x,x) - 6*u*v*Diff(v,x))"));
    return sys;
}

PdeSystem builtin_hirota_lax() {
    PdeSystem sys = builtin_hirota();
    sys.name = "hirota_lax";
    sys.dependents.push_back({"phi", 1});
    sys.dependents.push_back({"psi", 1});
    sys.parameters.push_back("lambda");
    Expr phi = Expr::jet("phi"), psi = Expr::jet("psi");
    Expr a = lax_a(), b = lax_b(), c = lax_c();
    auto lax = [&](const std::string& label, const char* lhs, const Expr& rhs) {
        add(sys, label, jet(lhs), rhs, Expr::jet(jet(lhs)) - rhs);
    };
    lax("F3", "Diff(phi,x)", parse("-I*lambda*phi + u*psi"));
    lax("F4", "Diff(psi,x)", parse("v*phi + I*lambda*psi"));
    lax("F5", "Diff(phi,t)", a * phi + b * psi);
    lax("F6", "Diff(psi,t)", c * phi - a * psi);
    return sys;
}

PdeSystem builtin_prolonged() {
    PdeSystem sys = builtin_hirota_lax();
    sys.name = "prolonged";
    sys.dependents.push_back({"f", 1});
    add(sys, "F7", jet("Diff(f,x)"), parse("phi*psi"), parse("Diff(f,x) - phi*psi"));
    add(sys, "F8", jet("Diff(f,t)"), f_t_rhs(), Expr::jet("f", {1, 0}) - f_t_rhs());
    return sys;
}

std::vector<PdeSystem> builtin_corpus() { return {builtin_hirota(), builtin_hirota_lax(), builtin_prolonged()}; }

std::optional<PdeSystem> builtin_system(const std::string& name) {
    for (auto& s : builtin_corpus())
        if (s.name == name) return s;
    return std::nullopt;
}

// ---- Closure ----------------------------------------------------------------

namespace {
constexpr int recursion_limit = 200;
}

Closure::Closure(std::vector<SolvedForm> rules, int max_order)
    : rules_(std::move(rules)), max_order_(max_order), memo_(std::make_shared<Memo>()) {}

Closure::Closure(const PdeSystem& sys, int max_order) : Closure(sys.solved, max_order) {}

const SolvedForm* Closure::rule_for(const JetCoordinate& jet) const {
    const SolvedForm* best = nullptr;
    for (const auto& r : rules_) {
        if (r.lhs.name != jet.name || !jet.index.dominates(r.lhs.index)) continue;
        if (!best || r.lhs.index.x > best->lhs.index.x ||
            (r.lhs.index.x == best->lhs.index.x && r.lhs.index.order() > best->lhs.index.order()))
            best = &r;
    }
    return best;
}

bool Closure::is_eliminable(const JetCoordinate& jet) const { return rule_for(jet) != nullptr; }

Expr Closure::reduced(const JetCoordinate& jet) const { return reduced_impl(jet, 0); }

Expr Closure::reduce(const Expr& e) const { return reduce_impl(e, 0); }

Expr Closure::reduced_impl(const JetCoordinate& jet, int depth) const {
    const SolvedForm* rule = rule_for(jet);
    if (!rule) return Expr::jet(jet);
    if (jet.index.order() > max_order_)
        throw ClosureRangeError("jet " + to_string(jet) + " exceeds closure order " + std::to_string(max_order_));
    if (depth > recursion_limit) throw Error("on-shell reduction does not terminate at " + to_string(jet));
    {
        std::lock_guard<std::mutex> lock(memo_->mu);
        auto it = memo_->values.find(jet);
        if (it != memo_->values.end()) return it->second;
    }
    DerivIndex extra = jet.index.minus(rule->lhs.index);
    Expr value;
    if (extra.order() == 0) {
        value = reduce_impl(rule->rhs, depth + 1);
    } else {
        Direction d = extra.t > 0 ? Direction::t : Direction::x;
        JetCoordinate lower{jet.name, d == Direction::t ? DerivIndex{jet.index.t - 1, jet.index.x}
                                                       : DerivIndex{jet.index.t, jet.index.x - 1}};
        value = reduce_impl(total_derivative(reduced_impl(lower, depth + 1), d), depth + 1);
    }
    std::lock_guard<std::mutex> lock(memo_->mu);
    return memo_->values.emplace(jet, std::move(value)).first->second;
}

Expr Closure::reduce_impl(const Expr& e, int depth) const {
    SubstitutionRules rules;
    for (const auto& j : jet_coordinates(e))
        if (is_eliminable(j)) rules.emplace(Atom::jet(j), reduced_impl(j, depth));
    return substitute(e, rules);
}

Expr on_shell_reduce(const Expr& e, const PdeSystem& sys, int max_order) { return Closure(sys, max_order).reduce(e); }

// ---- Consistent points --------------------------------------------------------

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

}  // namespace

ConsistentPoint::ConsistentPoint(std::shared_ptr<const Closure> closure, std::uint64_t seed)
    : closure_(std::move(closure)), seed_(seed) {}

void ConsistentPoint::set(const Atom& a, std::complex<double> v) {
    fixed_[a] = v;
    cache_.clear();
}

std::complex<double> ConsistentPoint::value(const Atom& a) const {
    if (auto it = fixed_.find(a); it != fixed_.end()) return it->second;
    if (auto it = cache_.find(a); it != cache_.end()) return it->second;
    std::complex<double> v;
    if (a.kind() == AtomKind::Jet && closure_ && closure_->is_eliminable(a.jet_coordinate())) {
        v = eval(closure_->reduced(a.jet_coordinate()));
    } else {
        std::uint64_t state = seed_ ^ fnv1a(to_string(a));
        double re = unit(splitmix(state));
        double im = unit(splitmix(state));
        v = {re, im};
    }
    cache_.emplace(a, v);
    return v;
}

std::complex<double> ConsistentPoint::eval(const Expr& e) const {
    return eval_numeric(e, [this](const Atom& a) { return value(a); });
}

AtomValueFn ConsistentPoint::as_function() const {
    return [this](const Atom& a) { return value(a); };
}

Assignment ConsistentPoint::materialize(const PdeSystem& sys, int max_order) const {
    Assignment out;
    for (const auto& p : sys.parameters) out[Atom::parameter(p)] = value(Atom::parameter(p));
    out[Atom::independent(Direction::x)] = value(Atom::independent(Direction::x));
    out[Atom::independent(Direction::t)] = value(Atom::independent(Direction::t));
    for (const auto& d : sys.dependents)
        for (int o = 0; o <= max_order; ++o)
            for (int t = 0; t <= o; ++t) {
                Atom a = Atom::jet(d.name, DerivIndex{t, o - t});
                out[a] = value(a);
            }
    return out;
}

ConsistentPoint consistent_point(const PdeSystem& sys, std::uint64_t seed, int max_order) {
    return ConsistentPoint(std::make_shared<Closure>(sys, max_order), seed);
}

// ---- Manifest -----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splits an optional "label:" prefix.
std::pair<std::string, std::string> split_label(const std::string& line) {
    auto colon = line.find(':');
    if (colon == std::string::npos) return {"", line};
    std::string label = trim(line.substr(0, colon));
    bool ident = !label.empty() && std::all_of(label.begin(), label.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
    if (!ident) return {"", line};
    return {label, trim(line.substr(colon + 1))};
}

}  // namespace

Manifest parse_manifest(const std::string& text) {
    Manifest m;
    PdeSystem& sys = m.system;
    sys.independents.clear();
    std::istringstream in(text);
    std::string raw, section;
    int lineno = 0;
    struct Pending {
        int line;
        std::string label, lhs, rhs;
    };
    std::vector<Pending> equations, solved, symmetry;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ManifestError("malformed section header", lineno);
            section = line.substr(1, line.size() - 2);
            continue;
        }
        if (section == "system") {
            sys.name = line;
        } else if (section == "independents") {
            if (line == "t") sys.independents.push_back(Direction::t);
            else if (line == "x") sys.independents.push_back(Direction::x);
            else throw ManifestError("unknown independent variable " + line, lineno);
        } else if (section == "dependents") {
            std::istringstream ls(line);
            DependentDecl d;
            if (!(ls >> d.name >> d.max_order)) throw ManifestError("expected `name max_order`", lineno);
            sys.dependents.push_back(d);
        } else if (section == "parameters") {
            sys.parameters.push_back(line);
        } else if (section == "equations") {
            auto [label, body] = split_label(line);
            equations.push_back({lineno, label, "", body});
        } else if (section == "solved" || section == "symmetry") {
            auto [label, body] = split_label(line);
            auto eq = body.find('=');
            if (eq == std::string::npos) throw ManifestError("expected `lhs = rhs`", lineno);
            (section == "solved" ? solved : symmetry)
                .push_back({lineno, label, trim(body.substr(0, eq)), trim(body.substr(eq + 1))});
        } else {
            throw ManifestError(section.empty() ? "content before first section" : "unknown section " + section, lineno);
        }
    }
    if (sys.independents.empty()) sys.independents = {Direction::t, Direction::x};
    SymbolTable symbols = sys.symbols();
    auto parse_at = [&](const std::string& s, int line) {
        try {
            return parse(s, symbols);
        } catch (const ParseError& e) {
            throw ManifestError(e.what(), line);
        }
    };
    int n = 0;
    for (const auto& p : equations) {
        ++n;
        sys.equations.push_back({p.label.empty() ? "F" + std::to_string(n) : p.label, parse_at(p.rhs, p.line)});
    }
    for (const auto& p : solved) {
        JetCoordinate lhs;
        try {
            lhs = parse_jet(p.lhs, symbols);
        } catch (const ParseError& e) {
            throw ManifestError(e.what(), p.line);
        }
        sys.solved.push_back({lhs, parse_at(p.rhs, p.line), p.label});
    }
    for (const auto& p : symmetry) {
        if (p.lhs.rfind("sigma_", 0) != 0) throw ManifestError("symmetry lines must start with sigma_", p.line);
        std::string dep = p.lhs.substr(6);
        if (!sys.has_dependent(dep)) throw ManifestError("unknown dependent " + dep, p.line);
        m.symmetry.emplace_back(dep, parse_at(p.rhs, p.line));
    }
    return m;
}

std::string emit_manifest(const PdeSystem& sys) {
    std::ostringstream out;
    out << "[system]\n" << sys.name << "\n\n[independents]\n";
    for (auto d : sys.independents) out << direction_name(d) << "\n";
    out << "\n[dependents]\n";
    for (const auto& d : sys.dependents) out << d.name << " " << d.max_order << "\n";
    out << "\n[parameters]\n";
    for (const auto& p : sys.parameters) out << p << "\n";
    out << "\n[equations]\n";
    for (const auto& e : sys.equations) out << e.label << ": " << to_string(e.expr) << "\n";
    out << "\n[solved]\n";
    for (const auto& r : sys.solved) {
        if (!r.source.empty()) out << r.source << ": ";
        out << to_string(r.lhs) << " = " << to_string(r.rhs) << "\n";
    }
    return out.str();
}

}  // namespace symflow
