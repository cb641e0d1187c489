#include "dagscore/commands.hpp"

#include "dagscore/errors.hpp"
#include "dagscore/exact_search.hpp"
#include "dagscore/io.hpp"
#include "dagscore/parallel.hpp"
#include "dagscore/rng.hpp"
#include "dagscore/sem_core.hpp"
#include "dagscore/simulation.hpp"
#include "dagscore/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <tuple>

namespace dagscore {

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void cmd_simulate(const SimulateArgs& args) {
    SimConfig cfg = sim_config_from_json(read_json_file(args.config_path));
    if (args.seed) cfg.seed = *args.seed;

    Rng rng(cfg.seed);
    const DagStructure graph = gen_graph(cfg, rng);
    const SemParams params = assign_weights(graph, cfg, rng);
    const Dataset data = cfg.model == ModelKind::LinearGaussian
                             ? sample_gaussian(params, cfg.n, rng)
                             : sample_logistic(params.b, cfg.n, rng);

    write_dataset_csv(join_path(args.out_dir, "data.csv"), data);
    write_matrix_csv(join_path(args.out_dir, "b_true.csv"), params.b);
    write_vector_csv(join_path(args.out_dir, "omega_true.csv"), params.omega);
    Json meta;
    meta["config"] = to_json(cfg);
    meta["seed"] = cfg.seed;
    meta["edge_count"] = graph.edge_count();
    write_json_file(join_path(args.out_dir, "meta.json"), meta);
}

void cmd_fit(const FitArgs& args) {
    const Json config_json = read_json_file(args.config_path);
    SolverConfig cfg = solver_config_from_json(config_json);
    if (args.seed) cfg.seed = *args.seed;
    const std::string method = config_json.contains("method")
                                   ? config_json.at("method").get<std::string>()
                                   : std::string("warm_start");
    if (method != "warm_start" && method != "single") {
        throw validation_error("fit method must be 'warm_start' or 'single'");
    }

    ScoreData data;
    if (args.covariance_input) {
        if (args.standardize_data) {
            throw validation_error("--standardize requires sample data, not a covariance input");
        }
        data = ScoreData::from_covariance(CovarianceMatrix(read_matrix_csv(args.data_path)));
    } else {
        Dataset dataset = read_dataset_csv(args.data_path);
        if (args.standardize_data) dataset = standardize(dataset);
        if (cfg.score == ScoreKind::LogisticNll) {
            data = ScoreData::from_dataset(std::move(dataset));
        } else {
            data = ScoreData::from_covariance(sample_covariance(dataset));
        }
    }
    if (cfg.score != ScoreKind::LogisticNll) {
        data.sigma_hat->require_positive_definite("fit");
    }

    const auto start_time = std::chrono::steady_clock::now();
    const SolveResult result =
        method == "warm_start"
            ? warm_start_path(data, cfg)
            : augmented_lagrangian_solve(
                  data, cfg, SemParams(Matrix::Zero(data.dim(), data.dim()), Vector::Ones(data.dim())));
    const double seconds = elapsed_seconds(start_time);

    write_matrix_csv(join_path(args.out_dir, "b_est.csv"), result.b_est);
    Json j = to_json(result);
    j["seconds"] = seconds;
    j["method"] = method;
    j["config"] = to_json(cfg);
    write_json_file(join_path(args.out_dir, "result.json"), j);
}

void cmd_exact(const ExactArgs& args) {
    const Matrix input = read_matrix_csv(args.input_path);
    double eps = 1e-8;
    CovarianceMatrix sigma = [&]() {
        if (args.covariance_input) {
            return CovarianceMatrix(input);
        }
        if (!args.eps) {
            throw validation_error(
                "exact: --eps is required for sample data input (coefficients from finite "
                "samples are generically nonzero)");
        }
        return sample_covariance(Dataset(input));
    }();
    if (args.eps) eps = *args.eps;

    PenaltySpec penalty;
    penalty.family = penalty_family_from_string(args.family);
    penalty.lambda = args.lambda;
    penalty.shape = args.shape;
    penalty.validate();

    const ExactSearchOptions opts{args.cap, args.threads};
    const PrecisionMatrix theta = PrecisionMatrix::inverse_of(sigma);
    const EquivalenceClass ec = enumerate_class(theta, eps, opts);
    const MinimalClass mc = minimal_class(ec, args.delta_margin);
    const ExactOptimum optimum = exact_regularized_optimum(sigma, penalty, eps, opts);

    auto member_json = [&](const ClassMember& member) {
        Json j;
        Json rows = Json::array();
        for (int i = 0; i < member.params.dim(); ++i) {
            Json row = Json::array();
            for (int c = 0; c < member.params.dim(); ++c) row.push_back(member.params.b(i, c));
            rows.push_back(std::move(row));
        }
        j["b"] = std::move(rows);
        j["omega"] = std::vector<double>(member.params.omega.data(),
                                         member.params.omega.data() + member.params.omega.size());
        j["orderings"] = member.orderings;
        j["edge_count"] = member.edge_count;
        j["nll"] = nll_full(member.params, sigma);
        return j;
    };

    Json out;
    out["p"] = sigma.dim();
    out["eps"] = eps;
    out["delta_margin"] = args.delta_margin;
    Json members = Json::array();
    for (const auto& member : ec.members) members.push_back(member_json(member));
    out["members"] = std::move(members);
    Json minimal = Json::array();
    for (const auto& member : mc.members) minimal.push_back(member_json(member));
    out["minimal_members"] = std::move(minimal);
    out["tau"] = std::isfinite(mc.tau) ? Json(mc.tau) : Json("inf");
    out["delta0"] = std::isfinite(mc.delta0) ? Json(mc.delta0) : Json("inf");
    out["penalty"] = to_json(penalty);
    Json opt = Json::array();
    for (const auto& member : optimum.members) opt.push_back(member_json(member));
    out["regularized_optimum"] = std::move(opt);
    out["regularized_optimum_score"] = optimum.score;
    write_json_file(join_path(args.out_dir, "class.json"), out);
}

namespace {

struct EvalMetrics {
    int shd = 0;
    bool valid = false;
    int edges_true = 0;
    int edges_est = 0;
    double skeleton_precision = 1.0;
    double skeleton_recall = 1.0;
};

EvalMetrics evaluate_estimate(const Matrix& b_est, const DagStructure& truth, double threshold) {
    EvalMetrics m;
    m.edges_true = truth.edge_count();
    const auto est = try_support_of(b_est, threshold);
    m.valid = est.has_value();
    if (!m.valid) {
        m.shd = -1;
        m.edges_est = static_cast<int>(support_edges(b_est, threshold).size());
        m.skeleton_precision = 0.0;
        m.skeleton_recall = 0.0;
        return m;
    }
    m.edges_est = est->edge_count();
    m.shd = shd_cpdag(cpdag_of(*est), cpdag_of(truth));
    std::set<std::pair<int, int>> true_skel, est_skel;
    for (int i = 0; i < truth.dim(); ++i) {
        for (int j = 0; j < truth.dim(); ++j) {
            if (truth.has_edge(i, j)) true_skel.insert({std::min(i, j), std::max(i, j)});
            if (est->has_edge(i, j)) est_skel.insert({std::min(i, j), std::max(i, j)});
        }
    }
    int hits = 0;
    for (const auto& e : est_skel) hits += true_skel.count(e) ? 1 : 0;
    m.skeleton_precision = est_skel.empty() ? 1.0 : static_cast<double>(hits) / est_skel.size();
    m.skeleton_recall = true_skel.empty() ? 1.0 : static_cast<double>(hits) / true_skel.size();
    return m;
}

}  // namespace

void cmd_eval(const EvalArgs& args) {
    const Matrix b_est = read_matrix_csv(args.b_est_path);
    const Matrix b_true = read_matrix_csv(args.b_true_path);
    if (b_est.rows() != b_true.rows() || b_est.cols() != b_true.cols()) {
        throw validation_error("eval: estimate and truth dimensions differ");
    }
    const DagStructure truth = support_of(b_true, 0.0);
    const EvalMetrics m = evaluate_estimate(b_est, truth, args.threshold);

    Json j;
    j["shd"] = m.shd;
    j["valid"] = m.valid;
    j["threshold"] = args.threshold;
    j["edges_true"] = m.edges_true;
    j["edges_est"] = m.edges_est;
    j["skeleton_precision"] = m.skeleton_precision;
    j["skeleton_recall"] = m.skeleton_recall;
    write_json_file(join_path(args.out_dir, "metrics.json"), j);
    std::printf("%s\n", j.dump(2).c_str());
}

namespace {

struct BenchMethod {
    std::string name;
    std::string fit_method = "warm_start";  // warm_start or single
    SolverConfig solver;
};

struct BenchCell {
    SimConfig sim;
    bool standardize_flag = false;
};

struct BenchSpec {
    std::string mode = "grid";
    int replicates = 1;
    std::uint64_t seed = 0;
    int threads = 0;
    std::vector<BenchCell> cells;
    std::vector<BenchMethod> methods;
    // delta_sweep settings
    std::vector<double> delta_fractions;
    int inits = 200;
    double init_range = 5.0;
};

BenchSpec bench_spec_from_json(const Json& j) {
    BenchSpec spec;
    spec.mode = j.value("mode", "grid");
    if (spec.mode != "grid" && spec.mode != "standardization" && spec.mode != "delta_sweep") {
        throw validation_error("bench mode must be grid, standardization, or delta_sweep");
    }
    spec.replicates = j.value("replicates", 1);
    if (spec.replicates < 1) throw validation_error("bench replicates must be at least 1");
    spec.seed = j.value("seed", 0ULL);
    spec.threads = j.value("threads", 0);
    if (j.contains("cells")) {
        for (const auto& cell : j.at("cells")) {
            BenchCell c;
            c.sim = sim_config_from_json(cell);
            c.standardize_flag = cell.value("standardize", false);
            spec.cells.push_back(std::move(c));
        }
    }
    std::set<std::string> names;
    if (j.contains("methods")) {
        for (const auto& method : j.at("methods")) {
            BenchMethod m;
            m.name = method.at("name").get<std::string>();
            m.fit_method = method.value("fit_method", "warm_start");
            if (m.fit_method != "warm_start" && m.fit_method != "single") {
                throw validation_error("bench method fit_method must be 'warm_start' or 'single'");
            }
            m.solver = method.contains("solver") ? solver_config_from_json(method.at("solver"))
                                                 : SolverConfig{};
            if (!names.insert(m.name).second) {
                throw validation_error("bench method names must be unique, got duplicate '" +
                                       m.name + "'");
            }
            spec.methods.push_back(std::move(m));
        }
    }
    spec.delta_fractions = j.value("delta_fractions", std::vector<double>{});
    spec.inits = j.value("inits", 200);
    spec.init_range = j.value("init_range", 5.0);
    if (spec.mode == "delta_sweep") {
        if (spec.delta_fractions.empty()) {
            for (int i = 1; i <= 9; ++i) spec.delta_fractions.push_back(0.1 * i);
        }
        if (spec.inits < 1) throw validation_error("bench inits must be at least 1");
    } else if (spec.cells.empty() || spec.methods.empty()) {
        throw validation_error("bench spec needs at least one cell and one method");
    }
    return spec;
}

struct ReplicateRow {
    int cell_index = 0;
    const BenchCell* cell = nullptr;
    bool standardized = false;
    std::string method;
    int replicate = 0;
    std::uint64_t seed = 0;
    int shd = 0;
    bool valid = true;
    int edges_true = 0;
    int edges_est = 0;
    double seconds = 0.0;
};

SolveResult run_method(const BenchMethod& method, const ScoreData& data, std::uint64_t seed,
                       const std::optional<SemParams>& start = std::nullopt) {
    SolverConfig cfg = method.solver;
    cfg.seed = seed;
    if (method.fit_method == "warm_start") {
        return warm_start_path(data, cfg, start);
    }
    const int p = data.dim();
    const SemParams at = start ? *start : SemParams(Matrix::Zero(p, p), Vector::Ones(p));
    return augmented_lagrangian_solve(data, cfg, at);
}

std::string csv_int(long long v) { return std::to_string(v); }

void append_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += fields[i];
    }
    out += '\n';
}

struct GroupStats {
    int n_runs = 0;
    int n_valid = 0;
    double mean_shd = 0.0;
    double stderr_shd = 0.0;
    int shd_zero = 0;
    double mean_distance = 0.0;
};

GroupStats stats_from(const std::vector<int>& shds, const std::vector<bool>& valids,
                      const std::vector<double>& distances) {
    GroupStats g;
    g.n_runs = static_cast<int>(shds.size());
    std::vector<double> valid_shds;
    for (std::size_t i = 0; i < shds.size(); ++i) {
        if (valids[i]) {
            ++g.n_valid;
            valid_shds.push_back(shds[i]);
            if (shds[i] == 0) ++g.shd_zero;
        }
    }
    if (!valid_shds.empty()) {
        double sum = 0.0;
        for (double s : valid_shds) sum += s;
        g.mean_shd = sum / valid_shds.size();
        if (valid_shds.size() > 1) {
            double ss = 0.0;
            for (double s : valid_shds) ss += (s - g.mean_shd) * (s - g.mean_shd);
            g.stderr_shd = std::sqrt(ss / (valid_shds.size() - 1)) /
                           std::sqrt(static_cast<double>(valid_shds.size()));
        }
    }
    if (!distances.empty()) {
        double sum = 0.0;
        for (double d : distances) sum += d;
        g.mean_distance = sum / distances.size();
    }
    return g;
}

void run_bench_grid(const BenchSpec& spec, bool paired_standardization, const std::string& out_dir) {
    struct Task {
        int cell_index;
        int replicate;
    };
    std::vector<Task> tasks;
    for (int c = 0; c < static_cast<int>(spec.cells.size()); ++c) {
        for (int r = 0; r < spec.replicates; ++r) tasks.push_back({c, r});
    }

    std::vector<std::vector<ReplicateRow>> task_rows(tasks.size());
    parallel_for_index(static_cast<std::int64_t>(tasks.size()), spec.threads, [&](std::int64_t t) {
        const Task task = tasks[static_cast<std::size_t>(t)];
        const BenchCell& cell = spec.cells[static_cast<std::size_t>(task.cell_index)];
        const std::uint64_t seed = Rng::derive_seed(spec.seed, static_cast<std::uint64_t>(t));
        Rng rng(seed);
        SimConfig sim = cell.sim;
        sim.seed = seed;
        const DagStructure graph = gen_graph(sim, rng);
        const SemParams params = assign_weights(graph, sim, rng);
        const Dataset data = sim.model == ModelKind::LinearGaussian
                                 ? sample_gaussian(params, sim.n, rng)
                                 : sample_logistic(params.b, sim.n, rng);
        const DagStructure truth = support_of(params.b, 0.0);
        const Cpdag truth_cpdag = cpdag_of(truth);

        std::vector<bool> variants;
        if (paired_standardization) {
            variants = {false, true};
        } else {
            variants = {cell.standardize_flag};
        }

        auto& rows = task_rows[static_cast<std::size_t>(t)];
        {
            ReplicateRow row;
            row.cell_index = task.cell_index;
            row.cell = &cell;
            row.standardized = false;
            row.method = "empty";
            row.replicate = task.replicate;
            row.seed = seed;
            Cpdag empty_cpdag;
            empty_cpdag.p = truth.dim();
            row.shd = shd_cpdag(empty_cpdag, truth_cpdag);
            row.valid = true;
            row.edges_true = truth.edge_count();
            row.edges_est = 0;
            row.seconds = 0.0;
            rows.push_back(row);
        }
        for (bool standardized : variants) {
            const Dataset fit_data = standardized ? standardize(data) : data;
            for (const auto& method : spec.methods) {
                ScoreData score_data =
                    method.solver.score == ScoreKind::LogisticNll
                        ? ScoreData::from_dataset(fit_data)
                        : ScoreData::from_covariance(sample_covariance(fit_data));
                const auto t0 = std::chrono::steady_clock::now();
                const SolveResult result = run_method(method, score_data, seed);
                const double seconds = elapsed_seconds(t0);
                const EvalMetrics m =
                    evaluate_estimate(result.b_est, truth, method.solver.threshold);
                ReplicateRow row;
                row.cell_index = task.cell_index;
                row.cell = &cell;
                row.standardized = standardized;
                row.method = method.name;
                row.replicate = task.replicate;
                row.seed = seed;
                row.shd = m.shd;
                row.valid = m.valid;
                row.edges_true = m.edges_true;
                row.edges_est = m.edges_est;
                row.seconds = seconds;
                rows.push_back(row);
            }
        }
    });

    std::string per_replicate =
        "cell_index,p,k,graph_kind,model,n,standardized,method,replicate,seed,shd,valid,"
        "edges_true,edges_est,seconds\n";
    for (const auto& rows : task_rows) {
        for (const auto& row : rows) {
            append_row(per_replicate,
                       {csv_int(row.cell_index), csv_int(row.cell->sim.p), csv_int(row.cell->sim.k),
                        to_string(row.cell->sim.graph_kind), to_string(row.cell->sim.model),
                        csv_int(row.cell->sim.n), csv_int(row.standardized ? 1 : 0), row.method,
                        csv_int(row.replicate), std::to_string(row.seed), csv_int(row.shd),
                        csv_int(row.valid ? 1 : 0), csv_int(row.edges_true), csv_int(row.edges_est),
                        format_double(row.seconds)});
        }
    }
    write_file_atomic(join_path(out_dir, "per_replicate.csv"), per_replicate);

    // Group rows by (cell, standardized flag, method) in first-seen order.
    struct GroupKey {
        int cell_index;
        bool standardized;
        std::string method;
        bool operator<(const GroupKey& o) const {
            return std::tie(cell_index, standardized, method) <
                   std::tie(o.cell_index, o.standardized, o.method);
        }
    };
    std::map<GroupKey, std::pair<std::vector<int>, std::vector<bool>>> groups;
    for (const auto& rows : task_rows) {
        for (const auto& row : rows) {
            auto& g = groups[{row.cell_index, row.standardized, row.method}];
            g.first.push_back(row.shd);
            g.second.push_back(row.valid);
        }
    }
    std::string summary =
        "cell_index,p,k,graph_kind,model,n,standardized,method,n_runs,n_valid,mean_shd,stderr_shd\n";
    for (const auto& [key, data] : groups) {
        const BenchCell& cell = spec.cells[static_cast<std::size_t>(key.cell_index)];
        const GroupStats g = stats_from(data.first, data.second, {});
        append_row(summary, {csv_int(key.cell_index), csv_int(cell.sim.p), csv_int(cell.sim.k),
                             to_string(cell.sim.graph_kind), to_string(cell.sim.model),
                             csv_int(cell.sim.n), csv_int(key.standardized ? 1 : 0), key.method,
                             csv_int(g.n_runs), csv_int(g.n_valid), format_double(g.mean_shd),
                             format_double(g.stderr_shd)});
    }
    write_file_atomic(join_path(out_dir, "summary.csv"), summary);
}

void run_bench_delta_sweep(const BenchSpec& spec, const std::string& out_dir) {
    if (spec.methods.size() != 1) {
        throw validation_error("delta_sweep mode expects exactly one method");
    }
    const BenchMethod& method = spec.methods.front();

    // Fork fixture: 0 -> 1 and 0 -> 2, unit weights, unit noise variances.
    Matrix b_true = Matrix::Zero(3, 3);
    b_true(0, 1) = 1.0;
    b_true(0, 2) = 1.0;
    const SemParams truth_params(b_true, Vector::Ones(3));
    const CovarianceMatrix sigma = covariance_of(truth_params);
    const DagStructure truth = support_of(b_true, 0.0);
    const Cpdag truth_cpdag = cpdag_of(truth);

    const PrecisionMatrix theta = precision_of(truth_params);
    const EquivalenceClass ec = enumerate_class(theta, 1e-8);
    const MinimalClass mc = minimal_class(ec, 1.0);
    const double delta0 = mc.delta0;

    struct SweepRow {
        double fraction = 0.0;
        double delta = 0.0;
        int init = 0;
        std::uint64_t seed = 0;
        int shd = 0;
        bool valid = true;
        double distance = 0.0;
        double seconds = 0.0;
    };
    const std::size_t total = spec.delta_fractions.size() * static_cast<std::size_t>(spec.inits);
    std::vector<SweepRow> rows(total);
    const ScoreData data = ScoreData::from_covariance(sigma);

    parallel_for_index(static_cast<std::int64_t>(total), spec.threads, [&](std::int64_t t) {
        const std::size_t f = static_cast<std::size_t>(t) / spec.inits;
        const int init = static_cast<int>(static_cast<std::size_t>(t) % spec.inits);
        const double fraction = spec.delta_fractions[f];
        const std::uint64_t seed = Rng::derive_seed(spec.seed, static_cast<std::uint64_t>(t));
        Rng rng(seed);
        Matrix b0 = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i != j) b0(i, j) = rng.uniform(-spec.init_range, spec.init_range);
            }
        }
        SolverConfig cfg = method.solver;
        cfg.penalty.shape = fraction * delta0;
        cfg.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        SolveResult result;
        if (method.fit_method == "warm_start") {
            result = warm_start_path(data, cfg, SemParams(b0, Vector::Ones(3)));
        } else {
            result = augmented_lagrangian_solve(data, cfg, SemParams(b0, Vector::Ones(3)));
        }
        SweepRow row;
        row.fraction = fraction;
        row.delta = fraction * delta0;
        row.init = init;
        row.seed = seed;
        row.seconds = elapsed_seconds(t0);
        row.valid = result.valid();
        row.shd = row.valid ? shd_cpdag(cpdag_of(*result.thresholded), truth_cpdag) : -1;
        row.distance = distance_to_class(mc.members, result.b_est);
        rows[static_cast<std::size_t>(t)] = row;
    });

    std::string per_replicate = "delta_fraction,delta,init,seed,shd,valid,distance,seconds\n";
    for (const auto& row : rows) {
        append_row(per_replicate,
                   {format_double(row.fraction), format_double(row.delta), csv_int(row.init),
                    std::to_string(row.seed), csv_int(row.shd), csv_int(row.valid ? 1 : 0),
                    format_double(row.distance), format_double(row.seconds)});
    }
    write_file_atomic(join_path(out_dir, "per_replicate.csv"), per_replicate);

    std::string summary =
        "delta_fraction,delta,n_runs,n_valid,frac_shd_zero,mean_shd_valid,mean_distance\n";
    for (std::size_t f = 0; f < spec.delta_fractions.size(); ++f) {
        std::vector<int> shds;
        std::vector<bool> valids;
        std::vector<double> distances;
        for (int i = 0; i < spec.inits; ++i) {
            const SweepRow& row = rows[f * spec.inits + i];
            shds.push_back(row.shd);
            valids.push_back(row.valid);
            distances.push_back(row.distance);
        }
        const GroupStats g = stats_from(shds, valids, distances);
        const double frac_zero = static_cast<double>(g.shd_zero) / g.n_runs;
        append_row(summary, {format_double(spec.delta_fractions[f]),
                             format_double(spec.delta_fractions[f] * delta0), csv_int(g.n_runs),
                             csv_int(g.n_valid), format_double(frac_zero),
                             format_double(g.mean_shd), format_double(g.mean_distance)});
    }
    write_file_atomic(join_path(out_dir, "summary.csv"), summary);
}

}  // namespace

void cmd_bench(const BenchArgs& args) {
    BenchSpec spec = bench_spec_from_json(read_json_file(args.spec_path));
    if (args.seed) spec.seed = *args.seed;
    if (args.threads) spec.threads = *args.threads;
    fs::create_directories(args.out_dir);
    if (spec.mode == "delta_sweep") {
        run_bench_delta_sweep(spec, args.out_dir);
    } else {
        run_bench_grid(spec, spec.mode == "standardization", args.out_dir);
    }
}

}  // namespace dagscore
