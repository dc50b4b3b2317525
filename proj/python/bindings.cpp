#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "symflow/conslaw.hpp"
#include "symflow/jetsys.hpp"
#include "symflow/parser.hpp"
#include "symflow/pipeline.hpp"

namespace py = pybind11;
using namespace symflow;

namespace {

py::list to_python(const std::vector<CheckResult>& checks) {
    py::list out;
    for (const auto& c : checks) {
        py::dict d;
        d["name"] = c.name;
        d["status"] = status_name(c.status);
        d["residual"] = c.residual;
        d["detail"] = c.detail;
        d["seconds"] = c.seconds;
        out.append(d);
    }
    return out;
}

PipelineOptions options(int max_order, std::uint64_t seed) {
    PipelineOptions o;
    o.max_order = max_order;
    o.seed = seed;
    return o;
}

Direction direction(const std::string& d) {
    if (d == "x") return Direction::x;
    if (d == "t") return Direction::t;
    throw Error("direction must be x or t");
}

PdeSystem system_named(const std::string& name) {
    auto s = builtin_system(name);
    if (!s) throw Error("unknown system " + name);
    return *s;
}

}  // namespace

PYBIND11_MODULE(_symflow, m) {
    m.doc() = "Exact symmetry and conservation-law checks for the coupled Hirota system";
    py::register_exception<Error>(m, "SymflowError", PyExc_ValueError);

    py::class_<Expr>(m, "Expr")
        .def(py::init([](const std::string& text) { return parse(text); }))
        .def("__str__", [](const Expr& e) { return to_string(e); })
        .def("__repr__", [](const Expr& e) { return "Expr('" + to_string(e) + "')"; })
        .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; })
        .def("__add__", [](const Expr& a, const Expr& b) { return a + b; })
        .def("__sub__", [](const Expr& a, const Expr& b) { return a - b; })
        .def("__mul__", [](const Expr& a, const Expr& b) { return a * b; })
        .def("__neg__", [](const Expr& a) { return -a; })
        .def("is_zero", &Expr::is_zero)
        .def("__len__", &Expr::size);

    m.def("parse", [](const std::string& text) { return parse(text); }, py::arg("text"));
    m.def("total_derivative", [](const Expr& e, const std::string& d) { return total_derivative(e, direction(d)); },
          py::arg("expr"), py::arg("direction"));
    m.def("euler_lagrange", &euler_lagrange, py::arg("expr"), py::arg("wrt"));
    m.def("reduce", [](const Expr& e, const std::string& system, int max_order) {
        return on_shell_reduce(e, system_named(system), max_order);
    }, py::arg("expr"), py::arg("system") = "prolonged", py::arg("max_order") = Closure::default_max_order);
    m.def("systems", [] {
        std::vector<std::string> out;
        for (const auto& s : builtin_corpus()) out.push_back(s.name);
        return out;
    });
    m.def("manifest", [](const std::string& system) { return emit_manifest(system_named(system)); }, py::arg("system"));

    m.def("zero_curvature", [](int mo, std::uint64_t seed) { return to_python(zero_curvature_checks(options(mo, seed))); },
          py::arg("max_order") = Closure::default_max_order, py::arg("seed") = 1);
    m.def("verify_symmetry", [](const std::string& family, int mo, std::uint64_t seed) {
        return to_python(symmetry_checks(family, options(mo, seed)));
    }, py::arg("family") = "all", py::arg("max_order") = Closure::default_max_order, py::arg("seed") = 1);
    m.def("finite_transform", [](double eps, bool group_law, int mo, std::uint64_t seed) {
        FlowRun run;
        run.epsilon = eps;
        run.group_law = group_law;
        return to_python(finite_transform_checks(run, options(mo, seed)));
    }, py::arg("epsilon") = 0.1, py::arg("group_law") = true, py::arg("max_order") = Closure::default_max_order,
       py::arg("seed") = 1);
    m.def("optimal_system", [](int samples, std::uint64_t seed) {
        PipelineOptions o = options(Closure::default_max_order, seed);
        o.random_cases = samples;
        nlohmann::json data;
        auto checks = optimal_system_checks(o, &data);
        py::dict brackets;
        for (const auto& [k, v] : data["structure_constants"].items()) brackets[py::str(k)] = v.get<std::string>();
        return py::make_tuple(to_python(checks), brackets);
    }, py::arg("samples") = 100, py::arg("seed") = 1);
    m.def("conservation", [](const std::string& generator, int points, int mo, std::uint64_t seed) {
        PipelineOptions o = options(mo, seed);
        o.numeric_points = points;
        return to_python(conservation_checks(generator, o));
    }, py::arg("generator") = "all", py::arg("numeric_points") = 10, py::arg("max_order") = Closure::default_max_order,
       py::arg("seed") = 1);
    m.def("acceptance", [](std::uint64_t seed) {
        py::list out;
        PipelineOptions o = options(Closure::default_max_order, seed);
        for (const auto& c : acceptance_criteria()) {
            auto checks = c.run(o);
            out.append(py::make_tuple(c.number, c.title, all_passed(checks), to_python(checks)));
        }
        return out;
    }, py::arg("seed") = 1);
}
