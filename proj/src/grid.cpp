#include "symflow/grid.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace symflow {

std::vector<std::complex<double>>& Grid::field(const std::string& name) {
    auto it = fields.find(name);
    if (it == fields.end()) throw GridError("grid has no field " + name);
    return it->second;
}

const std::vector<std::complex<double>>& Grid::field(const std::string& name) const {
    auto it = fields.find(name);
    if (it == fields.end()) throw GridError("grid has no field " + name);
    return it->second;
}

Grid Grid::same_shape() const {
    Grid g = *this;
    g.fields.clear();
    return g;
}

void Grid::validate() const {
    if (nx < 1 || nt < 1) throw GridError("grid must have at least one point");
    if (!(dx > 0) || !(dt > 0)) throw GridError("grid spacings must be positive");
    for (const auto& [name, v] : fields)
        if (v.size() != static_cast<std::size_t>(nx) * nt) throw GridError("field " + name + " has the wrong size");
}

Grid grid_from_exprs(const GridSpec& spec, const std::map<std::string, Expr>& fields,
                     const std::map<std::string, std::complex<double>>& parameters) {
    if (spec.nx < 2 || spec.nt < 2) throw GridError("grid spec needs nx, nt >= 2");
    Grid g;
    g.nx = spec.nx;
    g.nt = spec.nt;
    g.x0 = spec.x_min;
    g.t0 = spec.t_min;
    g.dx = (spec.x_max - spec.x_min) / (spec.nx - 1);
    g.dt = (spec.t_max - spec.t_min) / (spec.nt - 1);
    Assignment base;
    for (const auto& [k, v] : parameters) base[Atom::parameter(k)] = v;
    Atom ax = Atom::independent(Direction::x), at = Atom::independent(Direction::t);
    for (const auto& [name, e] : fields) {
        auto& out = g.fields[name];
        out.resize(static_cast<std::size_t>(g.nx) * g.nt);
        Assignment a = base;
        for (int n = 0; n < g.nt; ++n) {
            a[at] = g.t(n);
            for (int i = 0; i < g.nx; ++i) {
                a[ax] = g.x(i);
                out[n * g.nx + i] = eval_numeric(e, a);
            }
        }
    }
    return g;
}

namespace {

std::string shortest(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw GridError("bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::string format_complex(std::complex<double> z) {
    std::string im = shortest(z.imag());
    if (im.front() != '-') im = "+" + im;
    return shortest(z.real()) + im + "i";
}

std::complex<double> parse_complex(const std::string& text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw GridError("empty complex literal");
    if (s.back() != 'i') return {parse_double(s), 0.0};
    s.remove_suffix(1);
    for (std::size_t k = s.size(); k-- > 1;) {
        char c = s[k];
        if ((c == '+' || c == '-') && s[k - 1] != 'e' && s[k - 1] != 'E')
            return {parse_double(s.substr(0, k)), parse_double(s.substr(k))};
    }
    return {0.0, parse_double(s)};
}

std::string write_grid(const Grid& g) {
    g.validate();
    std::ostringstream out;
    out << "grid " << g.nx << " " << g.nt << " " << shortest(g.x0) << " " << shortest(g.dx) << " " << shortest(g.t0)
        << " " << shortest(g.dt) << "\n";
    for (const auto& [name, v] : g.fields) {
        out << "field " << name << "\n";
        for (int n = 0; n < g.nt; ++n) {
            for (int i = 0; i < g.nx; ++i) {
                if (i) out << ",";
                out << format_complex(v[n * g.nx + i]);
            }
            out << "\n";
        }
    }
    return out.str();
}

Grid read_grid(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Grid g;
    if (!std::getline(in, line)) throw GridError("empty grid file");
    {
        std::istringstream hs(line);
        std::string tag, x0, dx, t0, dt;
        if (!(hs >> tag >> g.nx >> g.nt >> x0 >> dx >> t0 >> dt) || tag != "grid") throw GridError("bad grid header");
        g.x0 = parse_double(x0);
        g.dx = parse_double(dx);
        g.t0 = parse_double(t0);
        g.dt = parse_double(dt);
    }
    if (g.nx < 1 || g.nt < 1) throw GridError("bad grid dimensions");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("field ", 0) != 0) throw GridError("expected field block, got '" + line.substr(0, 40) + "'");
        std::string name = line.substr(6);
        auto& v = g.fields[name];
        v.reserve(static_cast<std::size_t>(g.nx) * g.nt);
        for (int n = 0; n < g.nt; ++n) {
            if (!std::getline(in, line)) throw GridError("field " + name + " is truncated");
            std::size_t start = 0;
            int count = 0;
            while (true) {
                auto comma = line.find(',', start);
                v.push_back(parse_complex(line.substr(start, comma - start)));
                ++count;
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (count != g.nx) throw GridError("field " + name + " row " + std::to_string(n) + " has " + std::to_string(count) + " values");
        }
    }
    g.validate();
    return g;
}

}  // namespace symflow
