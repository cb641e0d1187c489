#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace dagscore {

struct SimulateArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

// Writes data.csv, b_true.csv, omega_true.csv, meta.json.
void cmd_simulate(const SimulateArgs& args);

struct FitArgs {
    std::string data_path;
    std::string config_path;
    bool covariance_input = false;
    bool standardize_data = false;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

// Writes b_est.csv and result.json.
void cmd_fit(const FitArgs& args);

struct ExactArgs {
    std::string input_path;
    bool covariance_input = false;
    std::string family = "quasi_mcp";
    double lambda = 0.1;
    double shape = 0.1;
    std::optional<double> eps;
    double delta_margin = 1.0;
    int cap = 9;
    int threads = 0;
    std::string out_dir = ".";
};

// Writes class.json with the full class, minimal members, tau, delta0, and
// the regularized optimum set.
void cmd_exact(const ExactArgs& args);

struct EvalArgs {
    std::string b_est_path;
    std::string b_true_path;
    double threshold = 0.3;
    std::string out_dir = ".";
};

// Writes metrics.json and prints it to stdout.
void cmd_eval(const EvalArgs& args);

struct BenchArgs {
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_dir = ".";
};

// Writes per_replicate.csv and summary.csv.
void cmd_bench(const BenchArgs& args);

}  // namespace dagscore
