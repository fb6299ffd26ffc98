#include "drcc/experiments.hpp"
#include "drcc/export.hpp"
#include "drcc/oracle.hpp"
#include "drcc/reform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using json = nlohmann::json;
using namespace drcc;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
}

Vector parse_vector(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ParseError("bad number '" + item + "'");
        }
        if (used != item.size()) throw ParseError("bad number '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw ParseError("empty vector");
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json to_json(const Vector& v) {
    json out = json::array();
    for (double e : v) out.push_back(e);
    return out;
}

json to_json(const SolveResult& r, const std::string& method) {
    json out;
    out["method"] = method;
    out["status"] = status_name(r.status);
    if (r.has_solution()) {
        out["objective"] = r.objective;
        out["x"] = to_json(r.x);
        out["values"] = to_json(r.values);
    }
    out["q"] = r.q;
    out["bound"] = r.bound;
    out["bound_gap"] = r.bound_gap;
    out["node_count"] = r.node_count;
    out["iteration_count"] = r.iteration_count;
    json diag = json::object();
    for (const auto& [key, value] : r.diagnostics) diag[key] = value;
    out["diagnostics"] = diag;
    return out;
}

Vector decision(const ChanceProgram& cp, const std::string& text) {
    Vector x = parse_vector(text);
    if (x.size() != cp.num_decisions()) {
        throw ParseError("--x has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(cp.num_decisions()));
    }
    return x;
}

struct SolveArgs {
    std::string problem;
    std::string method = "exact";
    std::string kappa;
    std::string weights;
    std::string risks;
    std::string out;
    double time_limit = kInf;
    long node_limit = 2000000;
    bool emulate_strict = false;
};

int run_solve(const SolveArgs& args) {
    const ChanceProgram cp = parse_problem(read_file(args.problem));
    SolveOptions options;
    options.time_limit = args.time_limit;
    options.node_limit = args.node_limit;
    SolveResult r;
    if (args.method == "exact") {
        ExactOptions exact;
        exact.solver = options;
        exact.emulate_strict = args.emulate_strict;
        r = solve_exact(cp, exact);
    } else if (args.method == "cvar") {
        if (!args.kappa.empty()) {
            Vector kappa = parse_vector(args.kappa);
            if (kappa.size() == 1) kappa = Vector::Constant(cp.num_samples(), kappa(0));
            r = solve_lp(build_kappa_model(cp, kappa), options);
        } else {
            std::optional<Vector> w;
            if (!args.weights.empty()) w = parse_vector(args.weights);
            r = solve_cvar(cp, w, options);
        }
    } else if (args.method == "bonferroni") {
        std::optional<std::vector<double>> risks;
        if (!args.risks.empty()) {
            const Vector v = parse_vector(args.risks);
            risks = std::vector<double>(v.begin(), v.end());
        }
        r = solve_bonferroni(cp, make_bonferroni_plan(cp, risks), options);
    } else {
        r = solve_classical(cp, options);
    }
    emit(args.out, to_json(r, args.method).dump(2) + "\n");
    return 0;
}

int run_quantify(const std::string& problem, const std::string& x_text, const std::string& out_path) {
    const ChanceProgram cp = parse_problem(read_file(problem));
    const Vector x = decision(cp, x_text);
    const auto unsafe = unsafe_halfspaces(cp, x);
    const Quantification q = worst_case_probability(cp.ball.center, unsafe, cp.ball.radius, cp.ball.norm);
    const DistanceProfile d = distance_profile(cp.ball.center, unsafe, cp.ball.norm);
    json out;
    out["probability"] = q.probability;
    out["unsafe_count"] = d.unsafe_count;
    out["distances"] = to_json(d.distances);
    out["j_star"] = q.worst_case.j_star;
    out["p_star"] = q.worst_case.p_star;
    out["saturated"] = q.worst_case.saturated;
    json support = json::array();
    for (std::size_t k = 0; k < q.worst_case.support.size(); ++k) {
        support.push_back({{"point", to_json(q.worst_case.support[k])}, {"mass", q.worst_case.masses[k]}});
    }
    out["worst_case"] = support;
    emit(out_path, out.dump(2) + "\n");
    return 0;
}

int run_check(const std::string& problem, const std::string& x_text, const std::string& test,
              const std::string& out_path) {
    const ChanceProgram cp = parse_problem(read_file(problem));
    const Vector x = decision(cp, x_text);
    FeasibilityReport rep;
    if (test == "exact") {
        rep = check_chance_feasible(cp.ball.center, unsafe_halfspaces(cp, x), cp.ball.radius, cp.epsilon,
                                    cp.ball.norm);
    } else if (cp.is_individual()) {
        rep = check_cvar_feasible_individual(cp.ball.center, cp.individual(), x, cp.ball.radius, cp.epsilon,
                                             cp.ball.norm);
    } else {
        rep = check_cvar_feasible_joint(cp.ball.center, cp.joint(), x, cp.ball.radius, cp.epsilon, cp.ball.norm);
    }
    json out;
    out["test"] = test;
    out["feasible"] = rep.feasible;
    out["lhs"] = rep.lhs;
    out["slack"] = rep.slack;
    emit(out_path, out.dump(2) + "\n");
    return 0;
}

int run_export(const std::string& problem, const std::string& method, const std::string& format,
               const std::string& out_path) {
    const ChanceProgram cp = parse_problem(read_file(problem));
    MipModel m;
    if (method == "exact") {
        if (cp.ball.radius <= 0.0) throw PreconditionError("the exact model needs theta > 0; export classical");
        m = build_exact_mip(cp, derive_big_m(cp));
    } else if (method == "cvar") {
        m = cp.is_individual() ? build_cvar_lp_individual(cp) : build_cvar_lp_joint(cp, optimal_cvar_weights(cp));
    } else if (method == "bonferroni") {
        m = build_bonferroni_lp(cp, make_bonferroni_plan(cp));
    } else {
        m = build_classical_mip(cp);
    }
    write_file(out_path, export_model(m, format == "mps" ? ExportFormat::Mps : ExportFormat::Lp));
    return 0;
}

int run_experiment(const std::string& name, std::uint64_t seed, const std::string& dir, long node_limit,
                   bool full_scale) {
    SolveOptions options;
    options.node_limit = node_limit;
    const std::filesystem::path out(dir);
    if (name == "portfolio") {
        write_file(out / "portfolio.csv", portfolio_experiment_csv(seed, options));
        if (full_scale) {
            PortfolioConfig cfg;
            cfg.seed = seed;
            cfg.assets = 50;
            cfg.samples = 100;
            cfg.norm = Norm::l2();
            const ChanceProgram cp = gen_portfolio(cfg);
            write_file(out / "portfolio_full_scale.mps", write_mps(build_exact_mip(cp, derive_big_m(cp))));
        }
    } else if (name == "transport") {
        write_file(out / "transport.csv", transport_experiment_csv(seed, options));
    } else if (name == "ex1") {
        Example1Config cfg;
        cfg.seed = seed;
        write_file(out / "ex1.csv", example1_csv(run_incomparability_ex1(cfg)));
    } else if (name == "ex2") {
        Example2Config cfg;
        cfg.seed = seed;
        write_file(out / "ex2.csv", example2_csv(run_incomparability_ex2(cfg)));
    } else {
        write_file(out / "crossval.csv", crossval_experiment_csv(seed, options));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust chance constrained programs over Wasserstein balls"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Solve a problem and print the result as JSON");
    solve->add_option("problem", solve_args.problem, "Problem JSON file")->required()->check(CLI::ExistingFile);
    solve->add_option("--method", solve_args.method)
        ->check(CLI::IsMember({"exact", "cvar", "bonferroni", "classical"}));
    solve->add_option("--kappa", solve_args.kappa, "Slopes for the cvar family: one value or N values");
    solve->add_option("--w", solve_args.weights, "Joint cvar row weights");
    solve->add_option("--risks", solve_args.risks, "Bonferroni risk split");
    solve->add_option("--time-limit", solve_args.time_limit, "Seconds");
    solve->add_option("--node-limit", solve_args.node_limit);
    solve->add_flag("--emulate-strict", solve_args.emulate_strict, "Resolve a collapsed normal by restricted solves");
    solve->add_option("--out", solve_args.out, "Write the JSON here instead of stdout");

    std::string problem, x_text, test = "exact", format = "mps", method = "exact", out_path;
    auto* quantify = app.add_subcommand("quantify", "Worst-case violation probability of a decision");
    quantify->add_option("problem", problem)->required()->check(CLI::ExistingFile);
    quantify->add_option("--x", x_text, "Comma-separated decision")->required();
    quantify->add_option("--out", out_path);

    auto* check = app.add_subcommand("check", "Feasibility test of a decision");
    check->add_option("problem", problem)->required()->check(CLI::ExistingFile);
    check->add_option("--x", x_text, "Comma-separated decision")->required();
    check->add_option("--test", test)->check(CLI::IsMember({"exact", "cvar"}));
    check->add_option("--out", out_path);

    auto* exp = app.add_subcommand("export", "Write the optimization model to a file");
    exp->add_option("problem", problem)->required()->check(CLI::ExistingFile);
    exp->add_option("--format", format)->check(CLI::IsMember({"mps", "lp"}));
    exp->add_option("--method", method)->check(CLI::IsMember({"exact", "cvar", "bonferroni", "classical"}));
    exp->add_option("--out", out_path)->required();

    std::string experiment;
    std::uint64_t seed = 1;
    long node_limit = 200000;
    bool full_scale = false;
    std::string dir = ".";
    auto* run = app.add_subcommand("experiment", "Run a seeded study and write its CSV");
    run->add_option("name", experiment)
        ->required()
        ->check(CLI::IsMember({"portfolio", "transport", "ex1", "ex2", "crossval"}));
    run->add_option("--seed", seed);
    run->add_option("--out", dir, "Output directory");
    run->add_option("--node-limit", node_limit);
    run->add_flag("--full-scale", full_scale, "Also export the 50-asset 2-norm portfolio model");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return run_solve(solve_args);
        if (*quantify) return run_quantify(problem, x_text, out_path);
        if (*check) return run_check(problem, x_text, test, out_path);
        if (*exp) return run_export(problem, method, format, out_path);
        return run_experiment(experiment, seed, dir, node_limit, full_scale);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
