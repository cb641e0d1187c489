#include "dagscore/commands.hpp"
#include "dagscore/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Score-based DAG structure learning with an exact ordering oracle"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string out_dir = ".";
    app.add_option("--seed", seed, "Master seed override");
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    app.add_option("--out", out_dir, "Output directory");

    auto* simulate = app.add_subcommand("simulate", "Generate a random SEM and sample data");
    std::string sim_config;
    simulate->add_option("--config", sim_config, "Simulation config JSON")->required();

    auto* fit = app.add_subcommand("fit", "Fit a DAG to data");
    std::string fit_data, fit_config;
    bool fit_cov = false, fit_standardize = false;
    fit->add_option("--data", fit_data, "Dataset CSV (or covariance CSV with --covariance)")
        ->required();
    fit->add_option("--config", fit_config, "Solver config JSON")->required();
    fit->add_flag("--covariance", fit_cov, "Treat the input as a covariance matrix");
    fit->add_flag("--standardize", fit_standardize, "Standardize columns before fitting");

    auto* exact = app.add_subcommand("exact", "Enumerate the equivalence class of a covariance");
    dagscore::ExactArgs exact_args;
    double exact_eps = -1.0;
    exact->add_option("--data", exact_args.input_path,
                      "Dataset CSV (or covariance CSV with --covariance)")
        ->required();
    exact->add_flag("--covariance", exact_args.covariance_input,
                    "Treat the input as a covariance matrix");
    exact->add_option("--family", exact_args.family, "Penalty family")->capture_default_str();
    exact->add_option("--lambda", exact_args.lambda, "Penalty lambda")->capture_default_str();
    exact->add_option("--shape", exact_args.shape, "Penalty shape (delta or a)")
        ->capture_default_str();
    exact->add_option("--eps", exact_eps,
                      "Zero tolerance (default 1e-8 for covariance input; required for sample "
                      "data)");
    exact->add_option("--delta-margin", exact_args.delta_margin, "Margin Delta in tau/(1+Delta)")
        ->capture_default_str();
    exact->add_option("--cap", exact_args.cap, "Enumeration dimension cap")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Compare an estimate against a ground truth");
    dagscore::EvalArgs eval_args;
    eval->add_option("--b-est", eval_args.b_est_path, "Estimated weighted adjacency CSV")
        ->required();
    eval->add_option("--b-true", eval_args.b_true_path, "True weighted adjacency CSV")->required();
    eval->add_option("--threshold", eval_args.threshold, "Post-processing threshold")
        ->capture_default_str();

    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep");
    std::string bench_spec;
    bench->add_option("--config", bench_spec, "Experiment spec JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        app.exit(e);
        return 2;
    }

    if (simulate->parsed()) {
        dagscore::cmd_simulate({sim_config, seed, out_dir});
    } else if (fit->parsed()) {
        dagscore::cmd_fit({fit_data, fit_config, fit_cov, fit_standardize, seed, out_dir});
    } else if (exact->parsed()) {
        if (exact_eps >= 0.0) exact_args.eps = exact_eps;
        exact_args.threads = threads;
        exact_args.out_dir = out_dir;
        dagscore::cmd_exact(exact_args);
    } else if (eval->parsed()) {
        eval_args.out_dir = out_dir;
        dagscore::cmd_eval(eval_args);
    } else if (bench->parsed()) {
        dagscore::BenchArgs args;
        args.spec_path = bench_spec;
        args.seed = seed;
        if (threads > 0) args.threads = threads;
        args.out_dir = out_dir;
        dagscore::cmd_bench(args);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const dagscore::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const dagscore::numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const dagscore::capacity_error& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
