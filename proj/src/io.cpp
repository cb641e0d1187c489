#include "dagscore/io.hpp"

#include "dagscore/errors.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dagscore {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    // Trim to the shortest representation that still round-trips.
    for (int precision = 1; precision < 17; ++precision) {
        char shorter[64];
        std::snprintf(shorter, sizeof(shorter), "%.*g", precision, value);
        double parsed = 0.0;
        std::sscanf(shorter, "%lf", &parsed);
        if (parsed == value) return shorter;
    }
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

bool parse_double(const std::string& text, double* out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    auto [ptr, ec] = std::from_chars(begin, end, *out);
    return ec == std::errc() && ptr == end && begin != end;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("cannot open file '" + path + "'");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

Matrix parse_numeric_rows(const std::vector<std::string>& lines, std::size_t first_row,
                          const std::string& path) {
    const std::size_t rows = lines.size() - first_row;
    if (rows == 0) {
        throw validation_error("file '" + path + "' has no data rows");
    }
    std::vector<std::vector<double>> values;
    values.reserve(rows);
    for (std::size_t r = first_row; r < lines.size(); ++r) {
        const auto fields = split_csv_line(lines[r]);
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], &v)) {
                throw validation_error("file '" + path + "' line " + std::to_string(r + 1) +
                                       " field " + std::to_string(c + 1) + ": not a number");
            }
            row.push_back(v);
        }
        if (!values.empty() && row.size() != values.front().size()) {
            throw validation_error("file '" + path + "' line " + std::to_string(r + 1) +
                                   ": inconsistent field count");
        }
        values.push_back(std::move(row));
    }
    Matrix m(static_cast<int>(values.size()), static_cast<int>(values.front().size()));
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) m(i, j) = values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& header) {
    std::string out;
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j > 0) out += ',';
            out += header[j];
        }
        out += '\n';
    }
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw validation_error("cannot write file '" + tmp.string() + "'");
        }
        out << content;
    }
    fs::rename(tmp, target);
}

Matrix read_matrix_csv(const std::string& path) {
    return parse_numeric_rows(read_lines(path), 0, path);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    write_file_atomic(path, matrix_to_csv(m, {}));
}

Vector read_vector_csv(const std::string& path) {
    Matrix m = read_matrix_csv(path);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw validation_error("file '" + path + "' is not a vector");
}

void write_vector_csv(const std::string& path, const Vector& v) {
    write_file_atomic(path, matrix_to_csv(v, {}));
}

Dataset read_dataset_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) {
        throw validation_error("file '" + path + "' is empty");
    }
    const auto first = split_csv_line(lines.front());
    bool header = false;
    for (const auto& field : first) {
        double v = 0.0;
        if (!parse_double(field, &v)) {
            header = true;
            break;
        }
    }
    Matrix x = parse_numeric_rows(lines, header ? 1 : 0, path);
    std::vector<std::string> names;
    if (header) names = first;
    return Dataset(std::move(x), std::move(names));
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    write_file_atomic(path, matrix_to_csv(data.x, data.column_names));
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("cannot open file '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw validation_error("file '" + path + "': " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

namespace {

template <typename T>
T field_or(const Json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw validation_error("config field '" + key + "': " + e.what());
    }
}

template <typename T>
T required_field(const Json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw validation_error("config is missing required field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw validation_error("config field '" + key + "': " + e.what());
    }
}

}  // namespace

Json to_json(const PenaltySpec& spec) {
    Json j;
    j["family"] = to_string(spec.family);
    j["lambda"] = spec.lambda;
    if (spec.uses_shape()) j["shape"] = spec.shape;
    return j;
}

PenaltySpec penalty_spec_from_json(const Json& j) {
    PenaltySpec spec;
    spec.family = penalty_family_from_string(required_field<std::string>(j, "family"));
    spec.lambda = required_field<double>(j, "lambda");
    spec.shape = field_or<double>(j, "shape", 1.0);
    spec.validate();
    return spec;
}

Json to_json(const AcyclicitySpec& spec) {
    Json j;
    j["kind"] = to_string(spec.kind);
    if (spec.kind == AcyclicityKind::LogDet) j["s"] = spec.s;
    return j;
}

AcyclicitySpec acyclicity_spec_from_json(const Json& j) {
    AcyclicitySpec spec;
    spec.kind = acyclicity_kind_from_string(field_or<std::string>(j, "kind", "trace_expm"));
    spec.s = field_or<double>(j, "s", 1.0);
    spec.validate();
    return spec;
}

Json to_json(const SimConfig& cfg) {
    Json j;
    j["p"] = cfg.p;
    j["k"] = cfg.k;
    j["graph_kind"] = to_string(cfg.graph_kind);
    j["weight_range"] = {cfg.weight_lo, cfg.weight_hi};
    j["noise_std_range"] = {cfg.noise_std_lo, cfg.noise_std_hi};
    j["n"] = cfg.n;
    j["model"] = to_string(cfg.model);
    j["seed"] = cfg.seed;
    return j;
}

SimConfig sim_config_from_json(const Json& j) {
    SimConfig cfg;
    cfg.p = required_field<int>(j, "p");
    cfg.k = required_field<int>(j, "k");
    cfg.graph_kind = graph_kind_from_string(field_or<std::string>(j, "graph_kind", "ER"));
    const auto weight = field_or<std::vector<double>>(j, "weight_range", {0.5, 1.5});
    const auto noise = field_or<std::vector<double>>(j, "noise_std_range", {0.1, 0.7});
    if (weight.size() != 2 || noise.size() != 2) {
        throw validation_error("weight_range and noise_std_range must each have two entries");
    }
    cfg.weight_lo = weight[0];
    cfg.weight_hi = weight[1];
    cfg.noise_std_lo = noise[0];
    cfg.noise_std_hi = noise[1];
    cfg.n = required_field<int>(j, "n");
    cfg.model = model_kind_from_string(field_or<std::string>(j, "model", "linear_gaussian"));
    cfg.seed = field_or<std::uint64_t>(j, "seed", 0);
    cfg.validate();
    return cfg;
}

Json to_json(const SolverConfig& cfg) {
    Json j;
    j["score"] = to_string(cfg.score);
    j["penalty"] = to_json(cfg.penalty);
    j["acyclicity"] = to_json(cfg.acyclicity);
    j["inner"] = {{"kind", to_string(cfg.inner.kind)},
                  {"max_iter", cfg.inner.max_iter},
                  {"grad_tol", cfg.inner.grad_tol},
                  {"memory", cfg.inner.memory},
                  {"learning_rate", cfg.inner.learning_rate}};
    j["outer"] = {{"alpha0", cfg.outer.alpha0},
                  {"rho0", cfg.outer.rho0},
                  {"rho_growth", cfg.outer.rho_growth},
                  {"progress_ratio", cfg.outer.progress_ratio},
                  {"h_tol", cfg.outer.h_tol},
                  {"max_rounds", cfg.outer.max_rounds},
                  {"rho_max", cfg.outer.rho_max}};
    j["gamma"] = cfg.gamma;
    j["threshold"] = cfg.threshold;
    j["warm_l1_lambda"] = cfg.warm_l1_lambda;
    j["decay_max_stages"] = cfg.decay_max_stages;
    j["seed"] = cfg.seed;
    return j;
}

SolverConfig solver_config_from_json(const Json& j) {
    SolverConfig cfg;
    cfg.score = score_kind_from_string(field_or<std::string>(j, "score", "gaussian_profile_nll"));
    if (j.contains("penalty")) cfg.penalty = penalty_spec_from_json(j.at("penalty"));
    if (j.contains("acyclicity")) cfg.acyclicity = acyclicity_spec_from_json(j.at("acyclicity"));
    if (j.contains("inner")) {
        const Json& inner = j.at("inner");
        cfg.inner.kind = inner_kind_from_string(field_or<std::string>(inner, "kind", "quasi_newton"));
        cfg.inner.max_iter = field_or<int>(inner, "max_iter", cfg.inner.max_iter);
        cfg.inner.grad_tol = field_or<double>(inner, "grad_tol", cfg.inner.grad_tol);
        cfg.inner.memory = field_or<int>(inner, "memory", cfg.inner.memory);
        cfg.inner.learning_rate = field_or<double>(inner, "learning_rate", cfg.inner.learning_rate);
    }
    if (j.contains("outer")) {
        const Json& outer = j.at("outer");
        cfg.outer.alpha0 = field_or<double>(outer, "alpha0", cfg.outer.alpha0);
        cfg.outer.rho0 = field_or<double>(outer, "rho0", cfg.outer.rho0);
        cfg.outer.rho_growth = field_or<double>(outer, "rho_growth", cfg.outer.rho_growth);
        cfg.outer.progress_ratio = field_or<double>(outer, "progress_ratio", cfg.outer.progress_ratio);
        cfg.outer.h_tol = field_or<double>(outer, "h_tol", cfg.outer.h_tol);
        cfg.outer.max_rounds = field_or<int>(outer, "max_rounds", cfg.outer.max_rounds);
        cfg.outer.rho_max = field_or<double>(outer, "rho_max", cfg.outer.rho_max);
    }
    cfg.gamma = field_or<double>(j, "gamma", cfg.gamma);
    cfg.threshold = field_or<double>(j, "threshold", cfg.threshold);
    cfg.warm_l1_lambda = field_or<double>(j, "warm_l1_lambda", cfg.warm_l1_lambda);
    cfg.decay_max_stages = field_or<int>(j, "decay_max_stages", cfg.decay_max_stages);
    cfg.seed = field_or<std::uint64_t>(j, "seed", 0);
    cfg.validate();
    return cfg;
}

namespace {

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Json to_json(const SolveResult& result) {
    Json j;
    j["converged"] = result.converged;
    j["valid"] = result.valid();
    j["h_final"] = result.h_final;
    j["nll_final"] = result.nll_final;
    j["penalty_final"] = result.penalty_final;
    if (result.omega_est.size() > 0) {
        j["omega_est"] = std::vector<double>(result.omega_est.data(),
                                             result.omega_est.data() + result.omega_est.size());
    }
    j["b_est"] = matrix_to_json(result.b_est);
    Json trace = Json::array();
    for (const auto& r : result.trace) {
        trace.push_back({{"round", r.round},
                         {"lambda", r.lambda},
                         {"delta", r.delta},
                         {"rho", r.rho},
                         {"alpha", r.alpha},
                         {"nll", r.nll},
                         {"penalty", r.penalty},
                         {"h", r.h}});
    }
    j["trace"] = std::move(trace);
    return j;
}

}  // namespace dagscore
