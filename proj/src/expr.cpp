#include "symflow/expr.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_map>

namespace symflow {

struct ExprRep {
    std::vector<Term> terms;
    bool has_reciprocal = false;
    bool has_exp = false;
};

struct AtomAccess {
    static Atom make_exp(const Expr& arg) {
        Atom a;
        a.kind_ = AtomKind::Exp;
        a.arg_ = arg.rep_;
        return a;
    }
    static Expr wrap(std::shared_ptr<const ExprRep> rep) { return Expr(std::move(rep)); }
    static Atom make_reciprocal(const Expr& poly) {
        Atom a;
        a.kind_ = AtomKind::Reciprocal;
        a.arg_ = poly.rep_;
        return a;
    }
};

namespace {

const std::shared_ptr<const ExprRep>& zero_rep() {
    static const auto rep = std::make_shared<const ExprRep>();
    return rep;
}

int compare_coeff(const Coefficient& a, const Coefficient& b) {
    if (int c = cmp(a.re(), b.re()); c != 0) return c < 0 ? -1 : 1;
    if (int c = cmp(a.im(), b.im()); c != 0) return c < 0 ? -1 : 1;
    return 0;
}

bool term_less(const Term& a, const Term& b) { return Monomial::compare(a.mono, b.mono) < 0; }

// Collapses all Exp factors of a sorted factor list into a single Exp(sum).
void normalize_exp(std::vector<Factor>& f) {
    auto first = std::find_if(f.begin(), f.end(), [](const Factor& x) { return x.atom.kind() == AtomKind::Exp; });
    if (first == f.end()) return;
    auto last = std::find_if(first, f.end(), [](const Factor& x) { return x.atom.kind() != AtomKind::Exp; });
    if (last - first == 1 && first->exponent == 1) return;
    Expr total;
    for (auto it = first; it != last; ++it) total += it->atom.argument() * Expr(static_cast<long>(it->exponent));
    auto pos = f.erase(first, last);
    if (!total.is_zero()) f.insert(pos, Factor{AtomAccess::make_exp(total), 1});
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
    const auto& fa = a.factors();
    const auto& fb = b.factors();
    if (fa.empty()) return b;
    if (fb.empty()) return a;
    std::vector<Factor> out;
    out.reserve(fa.size() + fb.size());
    std::size_t i = 0, j = 0;
    while (i < fa.size() || j < fb.size()) {
        int c;
        if (i == fa.size()) c = 1;
        else if (j == fb.size()) c = -1;
        else c = Atom::compare(fa[i].atom, fb[j].atom);
        if (c < 0) {
            out.push_back(fa[i++]);
        } else if (c > 0) {
            out.push_back(fb[j++]);
        } else {
            int e = fa[i].exponent + fb[j].exponent;
            if (e != 0) out.push_back(Factor{fa[i].atom, e});
            ++i;
            ++j;
        }
    }
    normalize_exp(out);
    return Monomial(std::move(out));
}

Monomial single(const Atom& a, int e) { return Monomial({Factor{a, e}}); }

// Terms sorted by monomial, like terms merged, zero coefficients dropped.
std::vector<Term> combine(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), term_less);
    std::vector<Term> out;
    out.reserve(terms.size());
    for (auto& t : terms) {
        if (!out.empty() && out.back().mono == t.mono) {
            out.back().coeff += t.coeff;
        } else {
            if (!out.empty() && out.back().coeff.is_zero()) out.pop_back();
            out.push_back(std::move(t));
        }
    }
    if (!out.empty() && out.back().coeff.is_zero()) out.pop_back();
    return out;
}

std::shared_ptr<const ExprRep> make_rep(std::vector<Term> combined) {
    auto rep = std::make_shared<ExprRep>();
    for (const auto& t : combined) {
        for (const auto& f : t.mono.factors()) {
            if (f.atom.kind() == AtomKind::Reciprocal) rep->has_reciprocal = true;
            if (f.atom.kind() == AtomKind::Exp) rep->has_exp = true;
        }
    }
    rep->terms = std::move(combined);
    return rep;
}

// ---- Laurent-polynomial helpers for the rational normal form ------------

// Lex order on exponent vectors; a group order compatible with products.
int group_compare(const Monomial& a, const Monomial& b) {
    const auto& fa = a.factors();
    const auto& fb = b.factors();
    std::size_t i = 0, j = 0;
    while (true) {
        if (i == fa.size() && j == fb.size()) return 0;
        if (j == fb.size() || (i < fa.size() && Atom::compare(fa[i].atom, fb[j].atom) < 0))
            return fa[i].exponent > 0 ? 1 : -1;
        if (i == fa.size() || Atom::compare(fb[j].atom, fa[i].atom) < 0) return fb[j].exponent > 0 ? -1 : 1;
        if (fa[i].exponent != fb[j].exponent) return fa[i].exponent > fb[j].exponent ? 1 : -1;
        ++i;
        ++j;
    }
}

Monomial mono_inverse_simple(const Monomial& m) {
    std::vector<Factor> f = m.factors();
    for (auto& x : f) x.exponent = -x.exponent;
    return Monomial(std::move(f));
}

bool has_kind(const Expr& e, AtomKind kind) {
    for (const auto& t : e.terms())
        for (const auto& f : t.mono.factors())
            if (f.atom.kind() == kind) return true;
    return false;
}

const Term& extreme_term(const Expr& e, int sign) {
    const Term* best = &e.terms().front();
    for (const auto& t : e.terms())
        if (group_compare(t.mono, best->mono) * sign > 0) best = &t;
    return *best;
}

// Multiplier clearing the negative exponents of simple atoms in e.
Monomial denominator_shift(const Expr& e) {
    std::map<Atom, int> need;
    for (const auto& t : e.terms())
        for (const auto& f : t.mono.factors())
            if (f.exponent < 0) {
                int& n = need[f.atom];
                n = std::max(n, -f.exponent);
            }
    std::vector<Factor> out;
    for (const auto& [a, n] : need) out.push_back(Factor{a, n});
    return Monomial(std::move(out));
}

bool nonnegative(const Monomial& m) {
    for (const auto& f : m.factors())
        if (f.exponent < 0) return false;
    return true;
}

// Exact quotient N / P when it exists. Both sides are shifted to ordinary
// polynomials first so that lex division terminates.
std::optional<Expr> exact_divide(const Expr& numerator, const Expr& divisor) {
    if (numerator.is_zero()) return Expr();
    if (has_kind(numerator, AtomKind::Exp) || has_kind(divisor, AtomKind::Exp)) return std::nullopt;
    Monomial ns = denominator_shift(numerator);
    Monomial ds = denominator_shift(divisor);
    auto shifted = [](const Expr& e, const Monomial& m) {
        if (m.empty()) return e;
        std::vector<Term> out;
        for (const auto& t : e.terms()) out.push_back(Term{t.coeff, mono_mul(t.mono, m)});
        return Expr::from_terms(std::move(out));
    };
    Expr rem = shifted(numerator, ns);
    Expr p = shifted(divisor, ds);
    const Term& lead = extreme_term(p, 1);
    Monomial lead_inv = mono_inverse_simple(lead.mono);
    Coefficient lead_c_inv = lead.coeff.inverse();
    std::vector<Term> quotient;
    while (!rem.is_zero()) {
        const Term& lt = extreme_term(rem, 1);
        Term q{lt.coeff * lead_c_inv, mono_mul(lt.mono, lead_inv)};
        if (!nonnegative(q.mono)) return std::nullopt;
        rem = rem - Expr::from_terms({q}) * p;
        quotient.push_back(std::move(q));
    }
    // N / P = (Q * ds) / ns
    std::vector<Term> out;
    Monomial undo = mono_mul(ds, mono_inverse_simple(ns));
    for (auto& q : quotient) out.push_back(Term{q.coeff, mono_mul(q.mono, undo)});
    return Expr::from_terms(std::move(out));
}

struct Fraction {
    Expr numerator;                        // reciprocal-free
    std::vector<std::pair<Expr, int>> den;  // normalized polynomial factors with multiplicity
};

Fraction to_fraction(const std::vector<Term>& terms) {
    std::map<Expr, int, decltype([](const Expr& a, const Expr& b) { return Expr::compare(a, b) < 0; })> kmax;
    for (const auto& t : terms)
        for (const auto& f : t.mono.factors())
            if (f.atom.kind() == AtomKind::Reciprocal) {
                int& k = kmax[f.atom.argument()];
                k = std::max(k, f.exponent);
            }
    Fraction out;
    if (kmax.empty()) {
        out.numerator = Expr::from_terms(terms);
        return out;
    }
    std::map<std::pair<int, int>, Expr> pow_cache;  // (factor id, power)
    std::vector<Expr> factors;
    for (const auto& [p, k] : kmax) factors.push_back(p);
    auto factor_pow = [&](std::size_t id, int n) -> const Expr& {
        auto key = std::make_pair(static_cast<int>(id), n);
        auto it = pow_cache.find(key);
        if (it == pow_cache.end()) it = pow_cache.emplace(key, pow(factors[id], n)).first;
        return it->second;
    };
    std::vector<Expr> parts;
    for (const auto& t : terms) {
        std::vector<Factor> rest;
        std::map<Expr, int, decltype([](const Expr& a, const Expr& b) { return Expr::compare(a, b) < 0; })> have;
        for (const auto& f : t.mono.factors()) {
            if (f.atom.kind() == AtomKind::Reciprocal) have[f.atom.argument()] = f.exponent;
            else rest.push_back(f);
        }
        Expr part = Expr::from_terms({Term{t.coeff, Monomial(std::move(rest))}});
        std::size_t id = 0;
        for (const auto& [p, k] : kmax) {
            auto it = have.find(p);
            int missing = k - (it == have.end() ? 0 : it->second);
            if (missing > 0) part = part * factor_pow(id, missing);
            ++id;
        }
        parts.push_back(std::move(part));
    }
    out.numerator = sum(parts);
    for (const auto& [p, k] : kmax) out.den.emplace_back(p, k);
    return out;
}

std::vector<Term> rational_normalize(std::vector<Term> terms) {
    Fraction fr = to_fraction(terms);
    for (auto& [p, k] : fr.den) {
        while (k > 0) {
            auto q = exact_divide(fr.numerator, p);
            if (!q) break;
            fr.numerator = *q;
            --k;
        }
    }
    if (fr.numerator.is_zero()) return {};
    std::vector<Factor> recips;
    for (const auto& [p, k] : fr.den)
        if (k > 0) recips.push_back(Factor{AtomAccess::make_reciprocal(p), k});
    std::sort(recips.begin(), recips.end(), [](const Factor& a, const Factor& b) { return a.atom < b.atom; });
    Monomial r(std::move(recips));
    std::vector<Term> out;
    out.reserve(fr.numerator.size());
    for (const auto& t : fr.numerator.terms()) out.push_back(Term{t.coeff, mono_mul(t.mono, r)});
    std::sort(out.begin(), out.end(), term_less);
    return out;
}

// Reciprocal of a reciprocal-free, nonzero expression.
Expr reciprocal_of_polynomial(const Expr& n) {
    const auto& terms = n.terms();
    if (terms.size() == 1) {
        const Term& t = terms.front();
        std::vector<Factor> inv;
        Expr extra(1);
        for (const auto& f : t.mono.factors()) {
            if (f.atom.kind() == AtomKind::Exp) extra = extra * exp(-(f.atom.argument() * Expr(static_cast<long>(f.exponent))));
            else inv.push_back(Factor{f.atom, -f.exponent});
        }
        return Expr::from_terms({Term{t.coeff.inverse(), Monomial(std::move(inv))}}) * extra;
    }
    // Content: minimum exponent of each simple atom across all terms (absent = 0).
    std::map<Atom, int> content;
    for (const auto& t : terms)
        for (const auto& f : t.mono.factors())
            if (f.atom.is_simple()) content.emplace(f.atom, 0);
    for (auto& [a, e] : content) {
        bool first = true;
        for (const auto& t : terms) {
            int d = t.mono.degree_of(a);
            e = first ? d : std::min(e, d);
            first = false;
        }
    }
    std::vector<Factor> g_inv;
    for (const auto& [a, e] : content)
        if (e != 0) g_inv.push_back(Factor{a, -e});
    Monomial g_inverse(std::move(g_inv));
    std::vector<Term> scaled;
    for (const auto& t : terms) scaled.push_back(Term{t.coeff, mono_mul(t.mono, g_inverse)});
    Expr p = Expr::from_terms(std::move(scaled));
    Coefficient c = p.terms().front().coeff;
    p = p.scaled(c.inverse());
    Expr recip(AtomAccess::make_reciprocal(p));
    return recip * Expr::from_terms({Term{c.inverse(), g_inverse}});
}

std::complex<double> ipow(std::complex<double> base, int e) {
    if (e < 0) return 1.0 / ipow(base, -e);
    std::complex<double> r = 1.0;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

}  // namespace

const char* direction_name(Direction d) { return d == Direction::t ? "t" : "x"; }

// ---- Atom -----------------------------------------------------------------

Atom Atom::parameter(std::string name) {
    Atom a;
    a.kind_ = AtomKind::Parameter;
    a.name_ = std::move(name);
    return a;
}

Atom Atom::independent(Direction d) {
    Atom a;
    a.kind_ = AtomKind::Independent;
    a.name_ = direction_name(d);
    return a;
}

Atom Atom::jet(JetCoordinate jet) {
    Atom a;
    a.kind_ = AtomKind::Jet;
    a.name_ = std::move(jet.name);
    a.index_ = jet.index;
    return a;
}

Expr Atom::argument() const { return arg_ ? Expr(arg_) : Expr(); }

int Atom::compare(const Atom& a, const Atom& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_ ? -1 : 1;
    switch (a.kind_) {
        case AtomKind::Parameter:
        case AtomKind::Independent:
            return a.name_.compare(b.name_) < 0 ? -1 : (a.name_ == b.name_ ? 0 : 1);
        case AtomKind::Jet: {
            if (int c = a.name_.compare(b.name_); c != 0) return c < 0 ? -1 : 1;
            auto c = a.index_ <=> b.index_;
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case AtomKind::Exp:
        case AtomKind::Reciprocal:
            if (a.arg_ == b.arg_) return 0;
            return Expr::compare(Expr(a.arg_), Expr(b.arg_));
    }
    return 0;
}

std::size_t AtomHasher::operator()(const Atom& a) const {
    std::size_t h = 1469598103934665603ull ^ static_cast<std::size_t>(a.kind());
    for (char ch : a.name()) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
    h = (h ^ static_cast<std::size_t>(a.index().t)) * 1099511628211ull;
    h = (h ^ static_cast<std::size_t>(a.index().x)) * 1099511628211ull;
    if (!a.is_simple()) h ^= a.argument().size();
    return h;
}

// ---- Monomial --------------------------------------------------------------

int Monomial::degree_of(const Atom& a) const {
    for (const auto& f : factors_)
        if (f.atom == a) return f.exponent;
    return 0;
}

int Monomial::total_degree() const {
    int d = 0;
    for (const auto& f : factors_) d += f.exponent;
    return d;
}

int Monomial::compare(const Monomial& a, const Monomial& b) {
    const auto& fa = a.factors_;
    const auto& fb = b.factors_;
    std::size_t n = std::min(fa.size(), fb.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = Atom::compare(fa[i].atom, fb[i].atom); c != 0) return c;
        if (fa[i].exponent != fb[i].exponent) return fa[i].exponent < fb[i].exponent ? -1 : 1;
    }
    if (fa.size() == fb.size()) return 0;
    return fa.size() < fb.size() ? -1 : 1;
}

Expr monomial_expr(const Monomial& m) { return Expr::from_terms({Term{Coefficient(1), m}}); }

// ---- Expr ------------------------------------------------------------------

Expr::Expr() : rep_(zero_rep()) {}

Expr::Expr(long value) : Expr(Coefficient(value)) {}

Expr::Expr(const Coefficient& c) : rep_(zero_rep()) {
    if (!c.is_zero()) rep_ = make_rep({Term{c, Monomial()}});
}

Expr::Expr(const Atom& atom) {
    if (atom.kind() == AtomKind::Exp && atom.argument().is_zero()) {
        rep_ = make_rep({Term{Coefficient(1), Monomial()}});
        return;
    }
    rep_ = make_rep({Term{Coefficient(1), single(atom, 1)}});
}

Expr Expr::from_terms(std::vector<Term> terms) {
    // Defensive normalization of caller-built monomials: sort, merge, collapse Exp.
    for (auto& t : terms) {
        const auto& f = t.mono.factors();
        bool sorted = true;
        for (std::size_t i = 1; i < f.size(); ++i)
            if (Atom::compare(f[i - 1].atom, f[i].atom) >= 0) sorted = false;
        bool exp_ok = true;
        int exp_count = 0;
        for (const auto& x : f) {
            if (x.exponent == 0) sorted = false;
            if (x.atom.kind() == AtomKind::Exp) {
                ++exp_count;
                if (x.exponent != 1 || x.atom.argument().is_zero()) exp_ok = false;
            }
        }
        if (!sorted || !exp_ok || exp_count > 1) {
            Monomial m;
            for (const auto& x : f)
                if (x.exponent != 0) m = mono_mul(m, single(x.atom, x.exponent));
            std::vector<Factor> ff = m.factors();
            normalize_exp(ff);
            t.mono = Monomial(std::move(ff));
        }
    }
    auto combined = combine(std::move(terms));
    bool recip = false;
    for (const auto& t : combined)
        for (const auto& f : t.mono.factors())
            if (f.atom.kind() == AtomKind::Reciprocal) recip = true;
    if (recip) combined = rational_normalize(std::move(combined));
    if (combined.empty()) return Expr();
    return Expr(make_rep(std::move(combined)));
}

const std::vector<Term>& Expr::terms() const { return rep_->terms; }

bool Expr::is_constant() const { return is_zero() || (size() == 1 && terms().front().mono.empty()); }

std::optional<Coefficient> Expr::constant_value() const {
    if (is_zero()) return Coefficient(0);
    if (is_constant()) return terms().front().coeff;
    return std::nullopt;
}

bool Expr::has_reciprocal() const { return rep_->has_reciprocal; }
bool Expr::has_exp() const { return rep_->has_exp; }

Expr Expr::scaled(const Coefficient& c) const {
    if (c.is_zero()) return Expr();
    auto rep = std::make_shared<ExprRep>(*rep_);
    for (auto& t : rep->terms) t.coeff *= c;
    return Expr(std::shared_ptr<const ExprRep>(std::move(rep)));
}

Expr Expr::operator-() const { return scaled(Coefficient(-1)); }

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.has_reciprocal() || b.has_reciprocal()) {
        std::vector<Term> all = a.terms();
        all.insert(all.end(), b.terms().begin(), b.terms().end());
        return Expr::from_terms(std::move(all));
    }
    // Merge of two sorted term lists.
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t i = 0, j = 0;
    while (i < ta.size() || j < tb.size()) {
        int c;
        if (i == ta.size()) c = 1;
        else if (j == tb.size()) c = -1;
        else c = Monomial::compare(ta[i].mono, tb[j].mono);
        if (c < 0) out.push_back(ta[i++]);
        else if (c > 0) out.push_back(tb[j++]);
        else {
            Coefficient s = ta[i].coeff + tb[j].coeff;
            if (!s.is_zero()) out.push_back(Term{std::move(s), ta[i].mono});
            ++i;
            ++j;
        }
    }
    if (out.empty()) return Expr();
    return Expr(make_rep(std::move(out)));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    if (a.is_constant() && !a.has_reciprocal()) return b.scaled(a.terms().front().coeff);
    if (b.is_constant() && !b.has_reciprocal()) return a.scaled(b.terms().front().coeff);
    std::vector<Term> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a.terms())
        for (const auto& y : b.terms()) out.push_back(Term{x.coeff * y.coeff, mono_mul(x.mono, y.mono)});
    return Expr::from_terms(std::move(out));
}

Expr operator/(const Expr& a, const Expr& b) { return a * reciprocal(b); }

int Expr::compare(const Expr& a, const Expr& b) {
    if (a.rep_ == b.rep_) return 0;
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t n = std::min(ta.size(), tb.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = Monomial::compare(ta[i].mono, tb[i].mono); c != 0) return c;
        if (int c = compare_coeff(ta[i].coeff, tb[i].coeff); c != 0) return c;
    }
    if (ta.size() == tb.size()) return 0;
    return ta.size() < tb.size() ? -1 : 1;
}

bool operator==(const Expr& a, const Expr& b) {
    if (Expr::compare(a, b) == 0) return true;
    if (!a.has_reciprocal() && !b.has_reciprocal()) return false;
    return (a - b).is_zero();
}

Expr sum(const std::vector<Expr>& parts) {
    std::size_t n = 0;
    bool recip = false;
    for (const auto& p : parts) {
        n += p.size();
        recip = recip || p.has_reciprocal();
    }
    if (parts.size() == 1) return parts.front();
    std::vector<Term> all;
    all.reserve(n);
    for (const auto& p : parts) all.insert(all.end(), p.terms().begin(), p.terms().end());
    if (!recip) {
        auto combined = combine(std::move(all));
        if (combined.empty()) return Expr();
        return AtomAccess::wrap(make_rep(std::move(combined)));
    }
    return Expr::from_terms(std::move(all));
}

Expr pow(const Expr& base, int exponent) {
    if (exponent == 0) return Expr(1);
    if (exponent < 0) return pow(reciprocal(base), -exponent);
    if (base.size() == 1 && !base.has_reciprocal()) {
        const Term& t = base.terms().front();
        Coefficient c(1);
        for (int i = 0; i < exponent; ++i) c *= t.coeff;
        std::vector<Factor> f;
        for (const auto& x : t.mono.factors()) {
            f.push_back(Factor{x.atom, x.exponent * exponent});
        }
        return Expr::from_terms({Term{c, Monomial(std::move(f))}});
    }
    Expr result(1);
    Expr b = base;
    int e = exponent;
    while (e > 0) {
        if (e & 1) result = result * b;
        e >>= 1;
        if (e > 0) b = b * b;
    }
    return result;
}

Expr reciprocal(const Expr& e) {
    if (e.is_zero()) throw Error("division by zero");
    if (!e.has_reciprocal()) return reciprocal_of_polynomial(e);
    Fraction fr = to_fraction(e.terms());
    Expr out = reciprocal_of_polynomial(fr.numerator);
    for (const auto& [p, k] : fr.den) out = out * pow(p, k);
    return out;
}

Expr exp(const Expr& argument) {
    if (argument.is_zero()) return Expr(1);
    return Expr(AtomAccess::make_exp(argument));
}

Expr canonicalize(const Expr& e) {
    std::vector<Expr> parts;
    parts.reserve(e.size());
    for (const auto& t : e.terms()) {
        Expr p(t.coeff);
        for (const auto& f : t.mono.factors()) {
            Expr base;
            switch (f.atom.kind()) {
                case AtomKind::Exp: base = exp(canonicalize(f.atom.argument())); break;
                case AtomKind::Reciprocal: base = reciprocal(canonicalize(f.atom.argument())); break;
                default: base = Expr(f.atom); break;
            }
            p = p * pow(base, f.exponent);
        }
        parts.push_back(std::move(p));
    }
    return sum(parts);
}

// ---- Differentiation ------------------------------------------------------

namespace {

// Shared skeleton for partial and total derivatives: `simple` returns the
// derivative of a simple atom (as an expression), `inner` differentiates
// Exp/reciprocal arguments.
template <class SimpleFn, class InnerFn>
Expr differentiate(const Expr& e, SimpleFn&& simple, InnerFn&& inner) {
    std::vector<Term> direct;
    std::vector<Expr> composite;
    for (const auto& t : e.terms()) {
        const auto& fs = t.mono.factors();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const Factor& f = fs[i];
            if (f.atom.is_simple()) {
                std::optional<Atom> d = simple(f.atom);
                if (!d) continue;
                // d/d(.) a^n = n a^(n-1) * a'; `d` is either the constant 1
                // (empty atom name) or a new atom a'.
                std::vector<Factor> rest;
                rest.reserve(fs.size() + 1);
                for (std::size_t j = 0; j < fs.size(); ++j) {
                    if (j != i) rest.push_back(fs[j]);
                    else if (f.exponent != 1) rest.push_back(Factor{f.atom, f.exponent - 1});
                }
                Monomial m(std::move(rest));
                if (d->kind() != AtomKind::Parameter || !d->name().empty()) m = mono_mul(m, single(*d, 1));
                direct.push_back(Term{t.coeff * Coefficient(f.exponent), std::move(m)});
            } else {
                Expr dg = inner(f.atom.argument());
                if (dg.is_zero()) continue;
                Expr term_expr = Expr::from_terms({t});
                if (f.atom.kind() == AtomKind::Exp) {
                    composite.push_back(term_expr * dg);
                } else {
                    Expr recip(f.atom);
                    composite.push_back((term_expr * recip * dg).scaled(Coefficient(-f.exponent)));
                }
            }
        }
    }
    composite.push_back(Expr::from_terms(std::move(direct)));
    return sum(composite);
}

Atom unit_marker() { return Atom::parameter(""); }

}  // namespace

Expr diff(const Expr& e, const Atom& wrt) {
    if (!wrt.is_simple()) throw Error("diff: can only differentiate with respect to a simple atom");
    return differentiate(
        e, [&](const Atom& a) -> std::optional<Atom> { return a == wrt ? std::optional<Atom>(unit_marker()) : std::nullopt; },
        [&](const Expr& g) { return diff(g, wrt); });
}

Expr total_derivative(const Expr& e, Direction dir) {
    const char* dname = direction_name(dir);
    return differentiate(
        e,
        [&](const Atom& a) -> std::optional<Atom> {
            switch (a.kind()) {
                case AtomKind::Independent:
                    if (a.name() == dname) return unit_marker();
                    return std::nullopt;
                case AtomKind::Jet: return Atom::jet(a.jet_coordinate().bumped(dir));
                default: return std::nullopt;
            }
        },
        [&](const Expr& g) { return total_derivative(g, dir); });
}

Expr total_derivative(const Expr& e, const DerivIndex& index) {
    Expr r = e;
    for (int i = 0; i < index.x; ++i) r = total_derivative(r, Direction::x);
    for (int i = 0; i < index.t; ++i) r = total_derivative(r, Direction::t);
    return r;
}

// ---- Substitution ---------------------------------------------------------

Expr substitute(const Expr& e, const SubstitutionRules& rules) {
    if (rules.empty()) return e;
    std::vector<Term> untouched;
    std::vector<Expr> parts;
    std::map<std::pair<Atom, int>, Expr> pow_cache;
    auto rule_pow = [&](const Atom& a, const Expr& rhs, int n) -> Expr {
        if (n == 1) return rhs;
        auto key = std::make_pair(a, n);
        auto it = pow_cache.find(key);
        if (it == pow_cache.end()) it = pow_cache.emplace(key, pow(rhs, n)).first;
        return it->second;
    };
    std::map<Atom, Expr> composite_cache;
    for (const auto& t : e.terms()) {
        bool touched = false;
        std::vector<Factor> keep;
        std::vector<Expr> replaced;
        for (const auto& f : t.mono.factors()) {
            if (f.atom.is_simple()) {
                auto it = rules.find(f.atom);
                if (it != rules.end()) {
                    touched = true;
                    replaced.push_back(rule_pow(f.atom, it->second, f.exponent));
                } else {
                    keep.push_back(f);
                }
                continue;
            }
            auto cit = composite_cache.find(f.atom);
            if (cit == composite_cache.end()) {
                Expr arg = f.atom.argument();
                Expr sub = substitute(arg, rules);
                Expr value;
                if (sub == arg) value = Expr(f.atom);
                else if (f.atom.kind() == AtomKind::Exp) value = exp(sub);
                else value = reciprocal(sub);
                cit = composite_cache.emplace(f.atom, value).first;
            }
            if (cit->second == Expr(f.atom)) {
                keep.push_back(f);
            } else {
                touched = true;
                replaced.push_back(pow(cit->second, f.exponent));
            }
        }
        if (!touched) {
            untouched.push_back(t);
            continue;
        }
        // Multiply the smallest factors first.
        std::sort(replaced.begin(), replaced.end(), [](const Expr& a, const Expr& b) { return a.size() < b.size(); });
        Expr p = Expr::from_terms({Term{t.coeff, Monomial(std::move(keep))}});
        for (const auto& r : replaced) {
            p = p * r;
            if (p.is_zero()) break;
        }
        parts.push_back(std::move(p));
    }
    parts.push_back(Expr::from_terms(std::move(untouched)));
    return sum(parts);
}

// ---- Evaluation -----------------------------------------------------------

std::complex<double> eval_numeric(const Expr& e, const AtomValueFn& value_of) {
    std::complex<double> total = 0.0;
    for (const auto& t : e.terms()) {
        std::complex<double> v = t.coeff.to_complex();
        for (const auto& f : t.mono.factors()) {
            switch (f.atom.kind()) {
                case AtomKind::Exp: v *= ipow(std::exp(eval_numeric(f.atom.argument(), value_of)), f.exponent); break;
                case AtomKind::Reciprocal: v *= ipow(eval_numeric(f.atom.argument(), value_of), -f.exponent); break;
                default: v *= ipow(value_of(f.atom), f.exponent); break;
            }
        }
        total += v;
    }
    return total;
}

std::complex<double> eval_numeric(const Expr& e, const Assignment& values) {
    return eval_numeric(e, [&](const Atom& a) {
        auto it = values.find(a);
        if (it == values.end()) throw EvaluationError("missing assignment for atom " + to_string(a));
        return it->second;
    });
}

// ---- Inspection -----------------------------------------------------------

namespace {
void collect_atoms(const Expr& e, std::set<Atom>& out) {
    for (const auto& t : e.terms())
        for (const auto& f : t.mono.factors()) {
            out.insert(f.atom);
            if (!f.atom.is_simple()) collect_atoms(f.atom.argument(), out);
        }
}
}  // namespace

std::set<Atom> atoms(const Expr& e) {
    std::set<Atom> out;
    collect_atoms(e, out);
    return out;
}

std::set<JetCoordinate> jet_coordinates(const Expr& e) {
    std::set<JetCoordinate> out;
    for (const auto& a : atoms(e))
        if (a.kind() == AtomKind::Jet) out.insert(a.jet_coordinate());
    return out;
}

int max_jet_order(const Expr& e, const std::string& name) {
    int best = -1;
    for (const auto& j : jet_coordinates(e))
        if (j.name == name) best = std::max(best, j.index.order());
    return best;
}

std::map<Monomial, Expr> split_by(const Expr& e, const std::function<bool(const Atom&)>& selected) {
    std::map<Monomial, std::vector<Term>> groups;
    for (const auto& t : e.terms()) {
        std::vector<Factor> key, rest;
        for (const auto& f : t.mono.factors()) (selected(f.atom) ? key : rest).push_back(f);
        groups[Monomial(std::move(key))].push_back(Term{t.coeff, Monomial(std::move(rest))});
    }
    std::map<Monomial, Expr> out;
    for (auto& [k, v] : groups) {
        Expr part = Expr::from_terms(std::move(v));
        if (!part.is_zero()) out.emplace(k, std::move(part));
    }
    return out;
}

std::map<int, Expr> polynomial_coefficients(const Expr& e, const Atom& var) {
    for (const auto& t : e.terms())
        for (const auto& f : t.mono.factors())
            if (!f.atom.is_simple() && atoms(f.atom.argument()).count(var))
                throw Error("polynomial_coefficients: variable occurs inside a transcendental factor");
    std::map<int, Expr> out;
    for (auto& [key, rest] : split_by(e, [&](const Atom& a) { return a == var; })) {
        int d = key.degree_of(var);
        if (d < 0) throw Error("polynomial_coefficients: negative power");
        out[d] = rest;
    }
    return out;
}

}  // namespace symflow
