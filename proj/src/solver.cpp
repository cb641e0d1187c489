#include "dagscore/solver.hpp"

#include "dagscore/errors.hpp"
#include "dagscore/sem_core.hpp"
#include "dagscore/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace dagscore {

std::string to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::GaussianProfileNll: return "gaussian_profile_nll";
        case ScoreKind::GaussianLs: return "gaussian_ls";
        case ScoreKind::LogisticNll: return "logistic_nll";
    }
    throw validation_error("unknown score kind");
}

ScoreKind score_kind_from_string(const std::string& name) {
    if (name == "gaussian_profile_nll") return ScoreKind::GaussianProfileNll;
    if (name == "gaussian_ls") return ScoreKind::GaussianLs;
    if (name == "logistic_nll") return ScoreKind::LogisticNll;
    throw validation_error("unknown score kind '" + name + "'");
}

std::string to_string(InnerKind kind) {
    switch (kind) {
        case InnerKind::QuasiNewton: return "quasi_newton";
        case InnerKind::AdaptiveFirstOrder: return "adaptive_first_order";
    }
    throw validation_error("unknown inner solver kind");
}

InnerKind inner_kind_from_string(const std::string& name) {
    if (name == "quasi_newton") return InnerKind::QuasiNewton;
    if (name == "adaptive_first_order") return InnerKind::AdaptiveFirstOrder;
    throw validation_error("unknown inner solver kind '" + name + "'");
}

void SolverConfig::validate() const {
    penalty.validate();
    acyclicity.validate();
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw validation_error("SolverConfig.gamma must lie in (0, 1)");
    }
    if (!(threshold >= 0.0)) {
        throw validation_error("SolverConfig.threshold must be nonnegative");
    }
    if (!(inner.grad_tol > 0.0) || inner.max_iter < 1 || inner.memory < 1 ||
        !(inner.learning_rate > 0.0)) {
        throw validation_error("SolverConfig.inner has invalid tolerances or budgets");
    }
    if (!(outer.h_tol > 0.0) || outer.max_rounds < 1 || !(outer.rho0 > 0.0) ||
        !(outer.rho_growth > 1.0) || !(outer.progress_ratio > 0.0 && outer.progress_ratio < 1.0)) {
        throw validation_error("SolverConfig.outer has invalid schedule parameters");
    }
    if (!(warm_l1_lambda >= 0.0)) {
        throw validation_error("SolverConfig.warm_l1_lambda must be nonnegative");
    }
    if (decay_max_stages < 1) {
        throw validation_error("SolverConfig.decay_max_stages must be at least 1");
    }
}

ScoreData ScoreData::from_covariance(CovarianceMatrix sigma) {
    ScoreData d;
    d.sigma_hat = std::move(sigma);
    return d;
}

ScoreData ScoreData::from_dataset(Dataset dataset) {
    ScoreData d;
    d.data = std::move(dataset);
    return d;
}

int ScoreData::dim() const {
    if (sigma_hat) return sigma_hat->dim();
    if (data) return data->p();
    throw validation_error("ScoreData contains neither covariance nor dataset");
}

namespace {

double eval_or_infinity(const Objective& objective, const Matrix& b, Matrix* grad, bool* ok) {
    try {
        const double value = objective(b, grad);
        if (std::isfinite(value) && (grad == nullptr || grad->allFinite())) {
            *ok = true;
            return value;
        }
    } catch (const numerical_error&) {
    }
    *ok = false;
    return std::numeric_limits<double>::infinity();
}

Matrix minimize_quasi_newton(const Objective& objective, const Matrix& start, const InnerConfig& cfg) {
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 60;
    constexpr double kPlateauTol = 1e-11;
    constexpr int kMaxStall = 3;

    Matrix x = start;
    Matrix grad(start.rows(), start.cols());
    bool ok = false;
    double fx = eval_or_infinity(objective, x, &grad, &ok);
    if (!ok) {
        throw numerical_error("inner_minimize: objective is not finite at the start point");
    }

    std::deque<Matrix> s_hist, y_hist;
    std::deque<double> rho_hist;
    int stall_count = 0;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        if (grad.cwiseAbs().maxCoeff() <= cfg.grad_tol) break;

        // Two-loop recursion for the search direction.
        Matrix direction = -grad;
        if (!s_hist.empty()) {
            const std::size_t m = s_hist.size();
            std::vector<double> a(m);
            for (std::size_t i = m; i-- > 0;) {
                a[i] = rho_hist[i] * s_hist[i].cwiseProduct(direction).sum();
                direction -= a[i] * y_hist[i];
            }
            const double yy = y_hist.back().squaredNorm();
            const double sy = 1.0 / rho_hist.back();
            if (yy > 0.0) direction *= sy / yy;
            for (std::size_t i = 0; i < m; ++i) {
                const double beta = rho_hist[i] * y_hist[i].cwiseProduct(direction).sum();
                direction += (a[i] - beta) * s_hist[i];
            }
        }
        double slope = grad.cwiseProduct(direction).sum();
        if (!(slope < 0.0)) {
            direction = -grad;
            slope = -grad.squaredNorm();
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        double step = s_hist.empty() ? 1.0 / std::max(1.0, grad.cwiseAbs().maxCoeff()) : 1.0;
        Matrix x_new;
        Matrix grad_new(start.rows(), start.cols());
        double f_new = 0.0;
        bool accepted = false;
        for (int halving = 0; halving < kMaxHalvings; ++halving) {
            x_new = x + step * direction;
            bool step_ok = false;
            f_new = eval_or_infinity(objective, x_new, &grad_new, &step_ok);
            if (step_ok && f_new <= fx + kArmijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Matrix s = x_new - x;
        const Matrix y = grad_new - grad;
        const double sy = s.cwiseProduct(y).sum();
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > cfg.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        const double improvement = fx - f_new;
        x = std::move(x_new);
        grad = std::move(grad_new);
        fx = f_new;
        if (improvement <= kPlateauTol * (1.0 + std::abs(fx))) {
            if (++stall_count >= kMaxStall) break;
        } else {
            stall_count = 0;
        }
    }
    return x;
}

Matrix minimize_adaptive_first_order(const Objective& objective, const Matrix& start,
                                     const InnerConfig& cfg) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    constexpr int kMaxHalvings = 60;

    Matrix x = start;
    Matrix grad(start.rows(), start.cols());
    bool ok = false;
    double fx = eval_or_infinity(objective, x, &grad, &ok);
    if (!ok) {
        throw numerical_error("inner_minimize: objective is not finite at the start point");
    }

    Matrix best_x = x;
    double best_f = fx;
    Matrix m = Matrix::Zero(start.rows(), start.cols());
    Matrix v = Matrix::Zero(start.rows(), start.cols());
    constexpr int kPatience = 200;
    int last_best_iter = 0;

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        if (grad.cwiseAbs().maxCoeff() <= cfg.grad_tol) break;
        m = kBeta1 * m + (1.0 - kBeta1) * grad;
        v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(kBeta1, iter);
        const double c2 = 1.0 - std::pow(kBeta2, iter);
        const Matrix update =
            (m / c1).cwiseQuotient(((v / c2).cwiseSqrt().array() + kEps).matrix());

        double scale = cfg.learning_rate;
        Matrix x_new;
        bool step_ok = false;
        for (int halving = 0; halving < kMaxHalvings; ++halving) {
            x_new = x - scale * update;
            fx = eval_or_infinity(objective, x_new, &grad, &step_ok);
            if (step_ok) break;
            scale *= 0.5;
        }
        if (!step_ok) break;
        x = std::move(x_new);
        if (fx < best_f) {
            if (best_f - fx > 1e-12 * (1.0 + std::abs(fx))) last_best_iter = iter;
            best_f = fx;
            best_x = x;
        }
        if (iter - last_best_iter >= kPatience) break;
    }
    return best_x;
}

}  // namespace

Matrix inner_minimize(const Objective& objective, const Matrix& start, const InnerConfig& cfg) {
    if (!start.allFinite()) {
        throw validation_error("inner_minimize: start point has non-finite entries");
    }
    if (cfg.kind == InnerKind::QuasiNewton) {
        return minimize_quasi_newton(objective, start, cfg);
    }
    return minimize_adaptive_first_order(objective, start, cfg);
}

namespace {

struct ScoreFunctions {
    std::function<double(const Matrix&)> value;
    std::function<Matrix(const Matrix&)> grad;
};

ScoreFunctions make_score(ScoreKind kind, const ScoreData& data) {
    switch (kind) {
        case ScoreKind::GaussianProfileNll: {
            if (!data.sigma_hat) {
                throw validation_error("gaussian_profile_nll score needs a covariance input");
            }
            const CovarianceMatrix& sigma = *data.sigma_hat;
            return {[&sigma](const Matrix& b) { return nll_profile(b, sigma); },
                    [&sigma](const Matrix& b) { return nll_profile_grad(b, sigma); }};
        }
        case ScoreKind::GaussianLs: {
            if (!data.sigma_hat) {
                throw validation_error("gaussian_ls score needs a covariance input");
            }
            const CovarianceMatrix& sigma = *data.sigma_hat;
            return {[&sigma](const Matrix& b) { return ls_loss(b, sigma); },
                    [&sigma](const Matrix& b) { return ls_loss_grad(b, sigma); }};
        }
        case ScoreKind::LogisticNll: {
            if (!data.data) {
                throw validation_error("logistic_nll score needs a dataset input");
            }
            const Dataset& dataset = *data.data;
            return {[&dataset](const Matrix& b) { return logistic_nll(b, dataset); },
                    [&dataset](const Matrix& b) { return logistic_nll_grad(b, dataset); }};
        }
    }
    throw validation_error("unknown score kind");
}

double reference_nll(ScoreKind kind, const ScoreData& data, const Matrix& b) {
    if (kind == ScoreKind::LogisticNll) {
        return logistic_nll(b, *data.data);
    }
    return nll_profile(b, *data.sigma_hat);
}

}  // namespace

std::optional<DagStructure> threshold_result(const Matrix& b_est, double cutoff) {
    return try_support_of(b_est, cutoff);
}

SolveResult augmented_lagrangian_solve(const ScoreData& data, const SolverConfig& cfg,
                                       const SemParams& start) {
    cfg.validate();
    if (!cfg.penalty.differentiable()) {
        throw validation_error("the solver refuses the non-differentiable l0 penalty");
    }
    const int p = data.dim();
    if (start.dim() != p) {
        throw validation_error("augmented_lagrangian_solve: start dimension mismatch");
    }
    const ScoreFunctions score = make_score(cfg.score, data);

    Matrix b = start.b;
    double alpha = cfg.outer.alpha0;
    double rho = cfg.outer.rho0;
    double h_prev = h_value(cfg.acyclicity, b);

    SolveResult result;

    for (int round = 0; round < cfg.outer.max_rounds; ++round) {
        const Objective objective = [&](const Matrix& bb, Matrix* grad) {
            const double h = h_value(cfg.acyclicity, bb);
            const double value = score.value(bb) + penalty_matrix(cfg.penalty, bb) +
                                 alpha * h + 0.5 * rho * h * h;
            if (grad != nullptr) {
                *grad = score.grad(bb) + penalty_matrix_grad(cfg.penalty, bb) +
                        (alpha + rho * h) * h_grad(cfg.acyclicity, bb);
                grad->diagonal().setZero();
            }
            return value;
        };
        b = inner_minimize(objective, b, cfg.inner);
        const double h_new = h_value(cfg.acyclicity, b);

        RoundRecord record;
        record.round = round;
        record.lambda = cfg.penalty.lambda;
        record.delta = cfg.penalty.uses_shape() ? cfg.penalty.shape : 0.0;
        record.rho = rho;
        record.alpha = alpha;
        record.nll = reference_nll(cfg.score, data, b);
        record.penalty = penalty_matrix(cfg.penalty, b);
        record.h = h_new;
        result.trace.push_back(record);

        if (h_new <= cfg.outer.h_tol) {
            result.converged = true;
            break;
        }
        if (h_new > cfg.outer.progress_ratio * h_prev) {
            rho = std::min(rho * cfg.outer.rho_growth, cfg.outer.rho_max);
        }
        alpha += rho * h_new;
        h_prev = h_new;
    }

    result.b_est = b;
    if (cfg.score == ScoreKind::LogisticNll) {
        result.omega_est = Vector();
    } else {
        result.omega_est = profile_noise(b, *data.sigma_hat);
    }
    result.h_final = h_value(cfg.acyclicity, b);
    result.nll_final = reference_nll(cfg.score, data, b);
    result.penalty_final = penalty_matrix(cfg.penalty, b);
    result.thresholded = threshold_result(b, cfg.threshold);
    return result;
}

SolveResult warm_start_path(const ScoreData& data, const SolverConfig& cfg,
                            const std::optional<SemParams>& start) {
    cfg.validate();
    const int p = data.dim();

    // Stage 1: least-squares + l1 initialization.
    ScoreData stage1_data = data;
    if (!stage1_data.sigma_hat) {
        stage1_data.sigma_hat = sample_covariance(*data.data);
    }
    SolverConfig stage1_cfg = cfg;
    stage1_cfg.score = ScoreKind::GaussianLs;
    stage1_cfg.penalty = PenaltySpec::l1(cfg.warm_l1_lambda);
    const SemParams zero_start(Matrix::Zero(p, p), Vector::Ones(p));
    SolveResult accepted =
        augmented_lagrangian_solve(stage1_data, stage1_cfg, start ? *start : zero_start);
    double nll_prev = reference_nll(cfg.score, cfg.score == ScoreKind::LogisticNll ? data : stage1_data,
                                    accepted.b_est);
    // Report the stage-1 result against the target score's components.
    accepted.nll_final = nll_prev;
    accepted.penalty_final = penalty_matrix(cfg.penalty, accepted.b_est);

    ScoreData stage2_data = data;
    if (cfg.score != ScoreKind::LogisticNll && !stage2_data.sigma_hat) {
        stage2_data.sigma_hat = stage1_data.sigma_hat;
    }

    double lambda = cfg.penalty.lambda;
    double shape = cfg.penalty.shape;
    std::vector<RoundRecord> trace = accepted.trace;
    SemParams current(accepted.b_est, Vector::Ones(p));

    for (int stage = 0; stage < cfg.decay_max_stages; ++stage) {
        SolverConfig stage_cfg = cfg;
        stage_cfg.penalty.lambda = lambda;
        stage_cfg.penalty.shape = shape;
        stage_cfg.penalty.validate();
        SolveResult candidate = augmented_lagrangian_solve(stage2_data, stage_cfg, current);
        if (!(candidate.nll_final < nll_prev)) break;
        nll_prev = candidate.nll_final;
        trace.insert(trace.end(), candidate.trace.begin(), candidate.trace.end());
        current = SemParams(candidate.b_est, Vector::Ones(p));
        accepted = std::move(candidate);
        lambda *= cfg.gamma;
        if (cfg.penalty.uses_shape()) shape *= cfg.gamma;
    }
    accepted.trace = std::move(trace);
    return accepted;
}

}  // namespace dagscore
