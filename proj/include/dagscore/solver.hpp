#pragma once

#include "dagscore/acyclicity.hpp"
#include "dagscore/graph_equiv.hpp"
#include "dagscore/penalties.hpp"
#include "dagscore/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dagscore {

enum class ScoreKind { GaussianProfileNll, GaussianLs, LogisticNll };
enum class InnerKind { QuasiNewton, AdaptiveFirstOrder };

std::string to_string(ScoreKind kind);
ScoreKind score_kind_from_string(const std::string& name);
std::string to_string(InnerKind kind);
InnerKind inner_kind_from_string(const std::string& name);

struct InnerConfig {
    InnerKind kind = InnerKind::QuasiNewton;
    int max_iter = 1000;
    double grad_tol = 1e-6;
    int memory = 10;            // QuasiNewton history length
    double learning_rate = 0.02;  // AdaptiveFirstOrder step size
};

struct OuterConfig {
    double alpha0 = 0.0;
    double rho0 = 1.0;
    double rho_growth = 10.0;
    double progress_ratio = 0.25;  // grow rho when h shrinks less than this factor
    double h_tol = 1e-8;
    int max_rounds = 100;
    double rho_max = 1e16;
};

struct SolverConfig {
    ScoreKind score = ScoreKind::GaussianProfileNll;
    PenaltySpec penalty = PenaltySpec::quasi_mcp(0.4, 0.2);
    AcyclicitySpec acyclicity;
    InnerConfig inner;
    OuterConfig outer;
    double gamma = 0.8;          // lambda/delta decay factor per accepted stage
    double threshold = 0.3;      // post-processing cutoff
    double warm_l1_lambda = 0.1; // l1 weight of the least-squares warm start
    int decay_max_stages = 20;
    std::uint64_t seed = 0;

    void validate() const;
};

// Gaussian scores consume a covariance; the logistic score consumes the
// binary dataset. warm_start_path derives the warm-start covariance from the
// dataset when none is given.
struct ScoreData {
    std::optional<CovarianceMatrix> sigma_hat;
    std::optional<Dataset> data;

    static ScoreData from_covariance(CovarianceMatrix sigma);
    static ScoreData from_dataset(Dataset dataset);

    int dim() const;
};

struct RoundRecord {
    int round = 0;
    double lambda = 0.0;
    double delta = 0.0;
    double rho = 0.0;
    double alpha = 0.0;
    double nll = 0.0;
    double penalty = 0.0;
    double h = 0.0;
};

struct SolveResult {
    Matrix b_est;
    Vector omega_est;
    std::optional<DagStructure> thresholded;
    bool converged = false;
    double h_final = 0.0;
    double nll_final = 0.0;
    double penalty_final = 0.0;
    std::vector<RoundRecord> trace;

    bool valid() const { return thresholded.has_value(); }
};

// Objective evaluated at B; writes the gradient when grad is non-null.
// Throwing numerical_error marks the point as outside the domain.
using Objective = std::function<double(const Matrix&, Matrix*)>;

// Unconstrained minimization to gradient tolerance or iteration budget;
// accepted steps never increase the objective.
Matrix inner_minimize(const Objective& objective, const Matrix& start, const InnerConfig& cfg);

// Minimizes score + penalty + alpha h + (rho/2) h^2 over rounds, growing rho
// and updating alpha until h <= h_tol or the round cap.
SolveResult augmented_lagrangian_solve(const ScoreData& data, const SolverConfig& cfg,
                                       const SemParams& start);

// Least-squares + l1 initialization followed by the lambda/delta decay loop;
// stages are accepted while the NLL decreases.
SolveResult warm_start_path(const ScoreData& data, const SolverConfig& cfg,
                            const std::optional<SemParams>& start = std::nullopt);

// Thresholded support, nullopt when cyclic.
std::optional<DagStructure> threshold_result(const Matrix& b_est, double cutoff);

}  // namespace dagscore
