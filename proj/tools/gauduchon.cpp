// Command-line front end. Reports go to stdout as a single JSON document, logs
// to stderr. Exit codes: 0 success, 2 argument errors, 3 nonconvergence.

#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gauduchon/catalog.hpp"
#include "gauduchon/coframe.hpp"
#include "gauduchon/error.hpp"
#include "gauduchon/io.hpp"
#include "gauduchon/kernels.hpp"
#include "gauduchon/metric.hpp"
#include "gauduchon/solver.hpp"

namespace {

using namespace gauduchon;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kArgument = 2;
constexpr int kNonconvergence = 3;

bool quiet = false;

void log(const std::string& msg) {
    if (!quiet) std::cerr << "gauduchon: " << msg << '\n';
}

// --opts FILE wins over the metric file's "options".
SolveOptions options_for(const std::string& opts_file, const io::MetricSpec& spec) {
    const json j = opts_file.empty() ? spec.options : io::read_json_file(opts_file);
    return solve_options_from_json(j.is_null() ? json::object() : j, spec.metric.shape());
}

std::string shape_string(const GridShape& s) {
    return json(s.sizes()).dump();
}

// Either inline JSON or a path to a JSON file.
json json_argument(const std::string& arg) {
    if (arg.empty()) return json::object();
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
        try {
            return json::parse(arg);
        } catch (const json::parse_error& e) {
            throw ArgumentError(std::string("malformed JSON argument: ") + e.what());
        }
    }
    return io::read_json_file(arg);
}

}  // namespace

int main(int argc, char** argv) {
    kernels::configure_threads_from_env();

    CLI::App app{"Generalized Gauduchon metrics: gamma_k invariants, classification and solvers"};
    app.require_subcommand(1);
    app.add_flag("-q,--quiet", quiet, "Suppress log lines on stderr");

    std::function<json()> run;

    // gamma
    std::string metric_file, opts_file;
    int k = 1;
    auto* gamma = app.add_subcommand("gamma", "Solve for gamma_k of a metric");
    gamma->add_option("--metric", metric_file, "Metric spec JSON")->required();
    gamma->add_option("--k", k, "Power k in 1..n-1")->required();
    gamma->add_option("--opts", opts_file, "Solver options JSON");
    gamma->callback([&] {
        run = [&] {
            const io::MetricSpec spec = io::load_metric_spec(metric_file);
            log("gamma_" + std::to_string(k) + " on grid " + shape_string(spec.metric.shape()));
            const SolveReport r = gamma_k(spec.metric, k, options_for(opts_file, spec));
            log("gamma = " + std::to_string(*r.gamma) + ", residual " + std::to_string(r.residual));
            return json(r);
        };
    });

    // classify
    double tol = 1e-8;
    auto* classify_cmd = app.add_subcommand("classify", "Kähler / balanced / Gauduchon / pluriclosed tests");
    classify_cmd->add_option("--metric", metric_file, "Metric spec JSON")->required();
    classify_cmd->add_option("--tol", tol, "Residual tolerance")->required()->check(CLI::PositiveNumber);
    classify_cmd->callback([&] {
        run = [&] {
            const io::MetricSpec spec = io::load_metric_spec(metric_file);
            return json(classify(spec.metric, tol));
        };
    });

    // reproduce
    std::string example, params;
    bool list = false;
    auto* reproduce = app.add_subcommand("reproduce", "Run a catalog example end to end");
    auto* example_opt = reproduce->add_option("--example", example, "Example name");
    reproduce->add_option("--params", params, "Parameter overrides, inline JSON or a file");
    reproduce->add_option("--opts", opts_file, "Solver options JSON");
    reproduce->add_flag("--list", list, "List the examples instead");
    reproduce->callback([&] {
        run = [&]() -> json {
            if (list) {
                json out = json::array();
                for (const auto& e : catalog::examples())
                    out.push_back({{"name", e.name}, {"description", e.description}, {"k", e.k},
                                   {"quantity", e.quantity}, {"expected_sign", std::string(1, e.expected_sign)},
                                   {"provenance", e.provenance}, {"parameters", e.parameters}});
                return out;
            }
            if (example_opt->count() == 0) throw ArgumentError("--example is required");
            SolveOptions opts;
            if (!opts_file.empty())
                opts = solve_options_from_json(io::read_json_file(opts_file), GridShape(1, {1, 1}));
            log("reproducing " + example);
            return json(catalog::reproduce(example, json_argument(params), opts));
        };
    });

    // find-gauduchon
    std::string metric1, metric2;
    int max_iterations = 60;
    auto* find = app.add_subcommand("find-gauduchon", "Bisect t w1 + (1-t) w2 for gamma_k = 0");
    find->add_option("--metric1", metric1, "Metric spec JSON")->required();
    find->add_option("--metric2", metric2, "Metric spec JSON")->required();
    find->add_option("--k", k, "Power k")->required();
    find->add_option("--tol", tol, "Bisection tolerance on |gamma|")->required()->check(CLI::PositiveNumber);
    find->add_option("--max-iterations", max_iterations, "Bisection steps")->check(CLI::PositiveNumber);
    find->add_option("--opts", opts_file, "Solver options JSON");
    find->callback([&] {
        run = [&] {
            const io::MetricSpec a = io::load_metric_spec(metric1);
            const io::MetricSpec b = io::load_metric_spec(metric2);
            const KGauduchonResult r =
                find_k_gauduchon(a.metric, b.metric, k, tol, options_for(opts_file, a), max_iterations);
            log("t* = " + std::to_string(r.t_star) + ", k-Gauduchon residual " + std::to_string(r.residual));
            return json(r);
        };
    });

    // conformal-check
    std::string rho;
    auto* conformal = app.add_subcommand("conformal-check", "Compare gamma_k of w and e^rho w");
    conformal->add_option("--metric", metric_file, "Metric spec JSON")->required();
    conformal->add_option("--rho", rho, "Conformal factor expression")->required();
    conformal->add_option("--k", k, "Power k")->required();
    conformal->add_option("--opts", opts_file, "Solver options JSON");
    conformal->callback([&] {
        run = [&] {
            const io::MetricSpec spec = io::load_metric_spec(metric_file);
            const GridFunction r = io::field_from_expression(rho, spec.metric.shape());
            return json(conformal_bounds_check(spec.metric, r, k, options_for(opts_file, spec)));
        };
    });

    // semilinear
    std::string b_file, f_expr;
    std::vector<std::string> psi_args{"linear"};
    auto* semilinear = app.add_subcommand("semilinear", "Solve Δv + ψ(|∇v|²) + <B, dv> = f + c");
    semilinear->add_option("--metric", metric_file, "Metric spec JSON")->required();
    semilinear->add_option("--B", b_file, "1-form spec JSON")->required();
    semilinear->add_option("--f", f_expr, "Right-hand side expression")->required();
    semilinear->add_option("--psi", psi_args, "'linear' or 'table FILE'")->expected(1, 2);
    semilinear->add_option("--opts", opts_file, "Solver options JSON");
    semilinear->callback([&] {
        run = [&] {
            const io::MetricSpec spec = io::load_metric_spec(metric_file);
            const GridShape& shape = spec.metric.shape();
            const OneFormPair B = io::one_form_spec_from_json(io::read_json_file(b_file), shape);
            const GridFunction f = io::field_from_expression(f_expr, shape);
            std::optional<PsiFunction> psi;
            if (psi_args.size() == 1 && psi_args[0] == "linear") psi = PsiFunction::linear();
            else if (psi_args.size() == 2 && psi_args[0] == "table")
                psi = PsiFunction::from_json(io::read_json_file(psi_args[1]));
            else throw ArgumentError("--psi takes 'linear' or 'table FILE'");
            return json(solve_semilinear(spec.metric, B, f, *psi, options_for(opts_file, spec)));
        };
    });

    // search
    std::string search_spec;
    auto* search = app.add_subcommand("search", "Sample a torus family for negative gamma_1");
    search->add_option("--spec", search_spec, "Search spec, inline JSON or a file");
    search->callback([&] {
        run = [&] {
            const catalog::SearchResult r = catalog::negative_gamma1_search(
                catalog::SearchSpec::from_json(json_argument(search_spec)));
            log(std::string("search ") + (r.success ? "found" : "did not find") + " a negative gamma");
            return catalog::search_json(r);
        };
    });

    // coframe
    std::string algebra_file, omega_text;
    std::vector<int> ks;
    auto* coframe_cmd = app.add_subcommand("coframe", "Exact gamma_k on an invariant coframe");
    coframe_cmd->add_option("--algebra", algebra_file, "Coframe algebra text file")->required();
    coframe_cmd->add_option("--omega", omega_text, "Metric form, e.g. (i/2)*(a^bar(a) + b^bar(b))")->required();
    coframe_cmd->add_option("--k", ks, "Powers k (default: all)");
    coframe_cmd->callback([&] {
        run = [&] {
            const coframe::CoframeAlgebra alg = coframe::CoframeAlgebra::parse(io::read_text_file(algebra_file));
            const coframe::CoframeForm w = alg.parse_form(omega_text);
            const int n = alg.dimension();
            json out = {{"dimension", n}, {"integrability", coframe::check_integrability(alg)}};
            if (ks.empty())
                for (int kk = 1; kk < n; ++kk) ks.push_back(kk);
            json gammas = json::object();
            for (int kk : ks) {
                const coframe::Rational g = coframe::gamma_k_invariant(alg, w, kk);
                gammas[std::to_string(kk)] = {{"exact", coframe::GaussianRational(g).to_string()},
                                              {"value", boost::rational_cast<double>(g)}};
            }
            out["gamma"] = gammas;
            const coframe::Rational p = coframe::pluriclosed_obstruction(alg, w, w);
            out["pluriclosed_obstruction"] = {{"exact", coframe::GaussianRational(p).to_string()},
                                              {"value", boost::rational_cast<double>(p)}};
            return out;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kArgument;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        const json out = run();
        std::cout << out.dump(2) << '\n';
        log("done in " +
            std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()) + " s");
        return kOk;
    } catch (const NonconvergenceError& e) {
        std::cerr << "gauduchon: error: " << e.what() << '\n';
        for (const auto& h : e.history()) std::cerr << "  " << h << '\n';
        return kNonconvergence;
    } catch (const Error& e) {
        std::cerr << "gauduchon: error: " << e.what() << '\n';
        return kArgument;
    } catch (const std::exception& e) {
        std::cerr << "gauduchon: internal error: " << e.what() << '\n';
        return kInternal;
    }
}
