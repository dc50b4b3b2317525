#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "symflow/expr.hpp"

namespace symflow {

// Uniform space-time grid; each field is stored row-major as nt rows of nx values.
struct Grid {
    int nx = 0, nt = 0;
    double x0 = 0, dx = 0, t0 = 0, dt = 0;
    std::map<std::string, std::vector<std::complex<double>>> fields;

    double x(int i) const { return x0 + i * dx; }
    double t(int n) const { return t0 + n * dt; }
    std::vector<std::complex<double>>& field(const std::string& name);
    const std::vector<std::complex<double>>& field(const std::string& name) const;
    std::complex<double> at(const std::string& name, int n, int i) const { return field(name)[n * nx + i]; }
    bool has(const std::string& name) const { return fields.count(name) > 0; }
    // Empty grid with the same geometry.
    Grid same_shape() const;
    void validate() const;
};

class GridError : public Error {
public:
    using Error::Error;
};

struct GridSpec {
    int nx = 201, nt = 101;
    double x_min = -5, x_max = 5, t_min = 0, t_max = 0.5;

    GridSpec refined(int factor) const {
        return {(nx - 1) * factor + 1, (nt - 1) * factor + 1, x_min, x_max, t_min, t_max};
    }
};

// Fills a grid by evaluating closed-form fields; expressions may use x, t and
// the parameter values given.
Grid grid_from_exprs(const GridSpec& spec, const std::map<std::string, Expr>& fields,
                     const std::map<std::string, std::complex<double>>& parameters);

std::string format_complex(std::complex<double> z);
std::complex<double> parse_complex(const std::string& s);

std::string write_grid(const Grid& g);
Grid read_grid(const std::string& text);

}  // namespace symflow
