#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "symflow/grid.hpp"
#include "symflow/grpflow.hpp"
#include "symflow/jetsys.hpp"
#include "symflow/numcheck.hpp"
#include "symflow/pipeline.hpp"

using namespace symflow;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

void print(const Report& r) {
    std::printf("%s\n", r.command.c_str());
    for (const auto& c : r.checks) {
        std::printf("  [%s] %s", status_name(c.status), c.name.c_str());
        if (!c.detail.empty()) std::printf(": %s", c.detail.c_str());
        if (c.status == Status::info && c.residual != 0.0) std::printf(" [%g]", c.residual);
        std::printf(" (%.3f s)\n", c.seconds);
    }
    std::printf("%s\n", all_passed(r.checks) ? "ok" : "FAILED");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symflow: symmetry, flow and conservation-law checks for the coupled Hirota system"};
    app.require_subcommand(1);
    std::string json_path;
    PipelineOptions opts;
    app.add_option("--json", json_path, "write the report as JSON");
    app.add_option("--max-order", opts.max_order, "closure jet order")->check(CLI::Range(3, 20));
    app.add_option("--seed", opts.seed, "seed for randomized checks");

    auto* zc = app.add_subcommand("zero-curvature", "Lax compatibility of phi, psi and f");

    auto* vs = app.add_subcommand("verify-symmetry", "check symmetries of the built-in or a user system");
    std::string family = "all", manifest_path;
    vs->add_option("--family", family, "nonlocal|localized|hirota|prolonged|all")
        ->check(CLI::IsMember({"nonlocal", "localized", "hirota", "prolonged", "all"}));
    vs->add_option("--manifest", manifest_path, "system manifest with a [symmetry] section");

    auto* ft = app.add_subcommand("finite-transform", "closed-form flow of the localized generator");
    FlowRun run;
    std::string grid_in, grid_out;
    double alpha = 1.0, beta = 0.5;
    ft->add_option("--epsilon", run.epsilon, "group parameter");
    ft->add_option("--grid", grid_in, "map this grid instead of the vacuum seed");
    ft->add_option("--grid-out", grid_out, "write the transformed grid");
    ft->add_option("--alpha", alpha, "alpha for residuals of --grid");
    ft->add_option("--beta", beta, "beta for residuals of --grid");
    bool group_law = false;
    ft->add_flag("--check-group-law", group_law, "also check the epsilon-ODE, group law and RK4 oracle");

    auto* os = app.add_subcommand("optimal-system", "structure table and one-dimensional optimal system");
    os->add_option("--samples", opts.random_cases, "random elements to normalize")->check(CLI::PositiveNumber);

    auto* cl = app.add_subcommand("conservation", "conserved vectors from the formal Lagrangian");
    std::string generator = "all", diagnose;
    cl->add_option("--generator", generator, "v1..v6|family|all")
        ->check(CLI::IsMember({"v1", "v2", "v3", "v4", "v5", "v6", "family", "all"}));
    cl->add_option("--numeric-points", opts.numeric_points, "consistent points for the numeric check")
        ->check(CLI::NonNegativeNumber);
    cl->add_option("--diagnose-T", diagnose, "file with Tt = ..., Tx = ... to compare against");

    auto* co = app.add_subcommand("corpus", "emit the built-in systems as manifests");
    std::string system_name;
    co->add_option("--system", system_name, "emit only this system");

    auto* all = app.add_subcommand("all", "run every acceptance check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Report report;
    report.command = app.get_subcommands().front()->get_name();
    std::ostringstream inputs;
    inputs << report.command << " max_order=" << opts.max_order << " seed=" << opts.seed;
    try {
        if (*zc) {
            report.checks = zero_curvature_checks(opts);
        } else if (*vs) {
            if (!manifest_path.empty()) {
                std::string text = read_file(manifest_path);
                inputs << " manifest=" << text;
                report.checks = manifest_symmetry_checks(parse_manifest(text), opts);
            } else {
                inputs << " family=" << family;
                report.checks = symmetry_checks(family, opts);
            }
        } else if (*ft) {
            run.group_law = group_law;
            inputs << " epsilon=" << run.epsilon << " group_law=" << group_law;
            if (!grid_in.empty()) {
                std::string text = read_file(grid_in);
                inputs << " grid=" << text << " alpha=" << alpha << " beta=" << beta;
                Grid mapped = map_solution(read_grid(text), run.epsilon);
                report.checks = grid_checks(mapped, alpha, beta);
                if (!grid_out.empty()) write_file(grid_out, write_grid(mapped));
                if (group_law) {
                    run.levels.clear();
                    auto c = finite_transform_checks(run, opts);
                    report.checks.insert(report.checks.end(), c.begin(), c.end());
                }
            } else {
                report.checks = finite_transform_checks(run, opts);
                if (!grid_out.empty())
                    write_file(grid_out, write_grid(map_solution(make_vacuum_grid(VacuumSeed{}), run.epsilon)));
            }
        } else if (*os) {
            inputs << " samples=" << opts.random_cases;
            report.checks = optimal_system_checks(opts, &report.data);
            std::printf("structure constants\n");
            for (const auto& [k, v] : report.data["structure_constants"].items())
                std::printf("  %s = %s\n", k.c_str(), v.get<std::string>().c_str());
        } else if (*cl) {
            inputs << " generator=" << generator << " points=" << opts.numeric_points;
            report.checks = conservation_checks(generator, opts);
            if (!diagnose.empty()) {
                std::string text = read_file(diagnose);
                inputs << " diagnose=" << text;
                auto d = diagnose_conserved_vector(generator, text, opts);
                report.checks.insert(report.checks.end(), d.begin(), d.end());
            }
        } else if (*co) {
            inputs << " system=" << system_name;
            std::vector<PdeSystem> systems;
            if (system_name.empty()) {
                systems = builtin_corpus();
            } else if (auto s = builtin_system(system_name)) {
                systems.push_back(*s);
            } else {
                std::fprintf(stderr, "unknown system %s\n", system_name.c_str());
                return 2;
            }
            for (const auto& s : systems) {
                std::string text = emit_manifest(s);
                std::printf("%s\n", text.c_str());
                report.data["manifests"][s.name] = text;
            }
            report.checks = corpus_checks(opts);
        } else if (*all) {
            for (const auto& c : acceptance_criteria()) {
                auto checks = c.run(opts);
                bool ok = all_passed(checks);
                report.data["criteria"].push_back({{"number", c.number}, {"title", c.title}, {"passed", ok}});
                for (auto& r : checks) {
                    r.name = "criterion " + std::to_string(c.number) + ": " + r.name;
                    report.checks.push_back(std::move(r));
                }
            }
        }
    } catch (const ManifestError& e) {
        std::fprintf(stderr, "manifest error: %s\n", e.what());
        return 2;
    } catch (const GridError& e) {
        std::fprintf(stderr, "grid error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    report.inputs = inputs.str();
    if (!*co) print(report);
    if (!json_path.empty()) {
        try {
            write_file(json_path, to_json(report).dump(2) + "\n");
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
    }
    return exit_code(report);
}
