#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dagscore/errors.hpp"
#include "dagscore/io.hpp"
#include "dagscore/rng.hpp"
#include "dagscore/types.hpp"

#include "support/oracles.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using namespace dagscore;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("dagscore_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DAGSCORE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("format_double round-trips bitwise") {
    const double values[] = {0.0,
                             1.0,
                             -1.0,
                             0.1,
                             1.0 / 3.0,
                             -0.5,
                             123456789.123456,
                             1e-300,
                             1e300,
                             1.8378770664093453,
                             std::numeric_limits<double>::min(),
                             std::numeric_limits<double>::epsilon(),
                             2.2250738585072014e-308};
    for (const double v : values) {
        CHECK(std::stod(format_double(v)) == v);
    }
    Rng rng(101);
    for (int rep = 0; rep < 1000; ++rep) {
        const double v = rng.normal(0.0, 1.0) * std::pow(10.0, rng.uniform(-10.0, 10.0));
        CHECK(std::stod(format_double(v)) == v);
    }

    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-0.25) == "-0.25");
}

TEST_CASE("matrix and vector CSV round-trips") {
    TempDir dir;
    Rng rng(102);
    Matrix m(3, 4);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) m(i, j) = rng.normal(0.0, 2.0);
    }
    write_matrix_csv(dir.file("m.csv"), m);
    const Matrix m2 = read_matrix_csv(dir.file("m.csv"));
    CHECK(oracles::max_abs_diff(m, m2) == 0.0);

    Vector v(5);
    for (int i = 0; i < 5; ++i) v[i] = rng.normal(0.0, 3.0);
    write_vector_csv(dir.file("v.csv"), v);
    const Vector v2 = read_vector_csv(dir.file("v.csv"));
    CHECK(oracles::max_abs_diff(v, v2) == 0.0);
}

TEST_CASE("dataset CSV round-trips with and without header") {
    TempDir dir;
    Matrix x(2, 3);
    x << 1.5, -2.0, 0.25, 4.0, 0.0, -1.0;

    const Dataset named(x, {"alpha", "beta", "gamma"});
    write_dataset_csv(dir.file("named.csv"), named);
    const Dataset named2 = read_dataset_csv(dir.file("named.csv"));
    CHECK(named2.column_names == std::vector<std::string>{"alpha", "beta", "gamma"});
    CHECK(oracles::max_abs_diff(named.x, named2.x) == 0.0);

    const Dataset anon(x);
    write_dataset_csv(dir.file("anon.csv"), anon);
    const Dataset anon2 = read_dataset_csv(dir.file("anon.csv"));
    CHECK(anon2.column_names.empty());
    CHECK(anon2.n() == 2);
    CHECK(oracles::max_abs_diff(anon.x, anon2.x) == 0.0);
}

TEST_CASE("CSV parsing errors carry positions") {
    TempDir dir;

    write_text(dir.file("empty.csv"), "");
    CHECK_THROWS_AS((void)read_matrix_csv(dir.file("empty.csv")), validation_error);

    write_text(dir.file("ragged.csv"), "1,2\n3\n");
    CHECK_THROWS_WITH_AS((void)read_matrix_csv(dir.file("ragged.csv")), doctest::Contains("line 2"),
                         validation_error);

    write_text(dir.file("bad.csv"), "1,2\n3,oops\n");
    CHECK_THROWS_AS((void)read_matrix_csv(dir.file("bad.csv")), validation_error);

    write_text(dir.file("header_mid.csv"), "1,2\na,b\n");
    CHECK_THROWS_AS((void)read_dataset_csv(dir.file("header_mid.csv")), validation_error);

    CHECK_THROWS_AS((void)read_matrix_csv(dir.file("missing.csv")), validation_error);

    // Trailing carriage returns and blank lines are tolerated.
    write_text(dir.file("crlf.csv"), "1,2\r\n3,4\r\n\n");
    const Matrix m = read_matrix_csv(dir.file("crlf.csv"));
    CHECK(m.rows() == 2);
    CHECK(m(1, 1) == 4.0);
}

TEST_CASE("write_file_atomic leaves no temp files behind") {
    TempDir dir;
    const std::string target = dir.file("nested/out.txt");
    write_file_atomic(target, "payload");
    CHECK(read_text(target) == "payload");

    write_file_atomic(target, "replaced");
    CHECK(read_text(target) == "replaced");

    int entries = 0;
    for (const auto& entry : fs::directory_iterator(dir.file("nested"))) {
        (void)entry;
        ++entries;
    }
    CHECK(entries == 1);
}

TEST_CASE("config JSON round-trips") {
    const PenaltySpec pen = PenaltySpec::scad(0.7, 3.2);
    const PenaltySpec pen2 = penalty_spec_from_json(to_json(pen));
    CHECK(pen2.family == pen.family);
    CHECK(pen2.lambda == pen.lambda);
    CHECK(pen2.shape == pen.shape);

    const AcyclicitySpec acy{AcyclicityKind::LogDet, 1.5};
    const AcyclicitySpec acy2 = acyclicity_spec_from_json(to_json(acy));
    CHECK(acy2.kind == acy.kind);
    CHECK(acy2.s == acy.s);

    SimConfig sim;
    sim.p = 7;
    sim.k = 3;
    sim.graph_kind = GraphKind::SF;
    sim.model = ModelKind::Logistic;
    sim.n = 123;
    sim.seed = 42;
    const SimConfig sim2 = sim_config_from_json(to_json(sim));
    CHECK(sim2.p == sim.p);
    CHECK(sim2.k == sim.k);
    CHECK(sim2.graph_kind == sim.graph_kind);
    CHECK(sim2.model == sim.model);
    CHECK(sim2.n == sim.n);
    CHECK(sim2.seed == sim.seed);

    SolverConfig solver;
    solver.score = ScoreKind::GaussianLs;
    solver.penalty = PenaltySpec::mcp(0.2, 2.5);
    solver.acyclicity = AcyclicitySpec{AcyclicityKind::LogDet, 2.0};
    solver.inner.kind = InnerKind::AdaptiveFirstOrder;
    solver.inner.learning_rate = 0.05;
    solver.gamma = 0.9;
    solver.threshold = 0.25;
    const SolverConfig solver2 = solver_config_from_json(to_json(solver));
    CHECK(solver2.score == solver.score);
    CHECK(solver2.penalty.family == solver.penalty.family);
    CHECK(solver2.penalty.lambda == solver.penalty.lambda);
    CHECK(solver2.acyclicity.kind == solver.acyclicity.kind);
    CHECK(solver2.acyclicity.s == solver.acyclicity.s);
    CHECK(solver2.inner.kind == solver.inner.kind);
    CHECK(solver2.inner.learning_rate == solver.inner.learning_rate);
    CHECK(solver2.gamma == solver.gamma);
    CHECK(solver2.threshold == solver.threshold);
}

TEST_CASE("JSON parsing rejects malformed input") {
    TempDir dir;
    write_text(dir.file("broken.json"), "{\"family\": ");
    CHECK_THROWS_AS((void)read_json_file(dir.file("broken.json")), validation_error);

    CHECK_THROWS_AS((void)penalty_spec_from_json(Json{{"lambda", 0.1}}), validation_error);
    CHECK_THROWS_AS((void)penalty_spec_from_json(Json{{"family", "l1"}}), validation_error);
    CHECK_THROWS_AS((void)penalty_spec_from_json(Json{{"family", "huber"}, {"lambda", 0.1}}),
                    validation_error);
    CHECK_THROWS_AS((void)sim_config_from_json(Json{{"graph_kind", "lattice"}}), validation_error);
}

TEST_CASE("CLI argument errors and help") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("simulate") == 2);
    CHECK(run_cli("fit --data nope.csv") == 2);
}

TEST_CASE("CLI simulate writes a reproducible dataset") {
    TempDir dir;
    const Json cfg{{"p", 6},      {"k", 2},
                   {"graph_kind", "ER"}, {"model", "linear_gaussian"},
                   {"n", 50},     {"seed", 7}};
    write_json_file(dir.file("sim.json"), cfg);

    fs::create_directories(dir.file("a"));
    CHECK(run_cli("--out " + dir.file("a") + " simulate --config " + dir.file("sim.json")) == 0);
    for (const std::string name : {"data.csv", "b_true.csv", "omega_true.csv", "meta.json"}) {
        CHECK(fs::exists(dir.file("a/" + name)));
    }
    const Dataset data = read_dataset_csv(dir.file("a/data.csv"));
    CHECK(data.n() == 50);
    CHECK(data.p() == 6);
    const Matrix b_true = read_matrix_csv(dir.file("a/b_true.csv"));
    CHECK(b_true.rows() == 6);

    fs::create_directories(dir.file("b"));
    CHECK(run_cli("--out " + dir.file("b") + " simulate --config " + dir.file("sim.json")) == 0);
    CHECK(read_text(dir.file("a/data.csv")) == read_text(dir.file("b/data.csv")));

    fs::create_directories(dir.file("c"));
    CHECK(run_cli("--seed 8 --out " + dir.file("c") + " simulate --config " + dir.file("sim.json")) ==
          0);
    CHECK(read_text(dir.file("a/data.csv")) != read_text(dir.file("c/data.csv")));

    const Json bad{{"p", 4}, {"k", 2}, {"graph_kind", "ER"}, {"model", "linear_gaussian"}, {"n", 10}};
    write_json_file(dir.file("bad.json"), bad);
    CHECK(run_cli("simulate --config " + dir.file("bad.json")) == 2);
}

TEST_CASE("CLI fit produces an estimate and a report") {
    TempDir dir;
    const Json sim{{"p", 5},      {"k", 2},
                   {"graph_kind", "ER"}, {"model", "linear_gaussian"},
                   {"n", 400},    {"seed", 11}};
    write_json_file(dir.file("sim.json"), sim);
    fs::create_directories(dir.file("sim_out"));
    REQUIRE(run_cli("--out " + dir.file("sim_out") + " simulate --config " + dir.file("sim.json")) ==
            0);

    write_json_file(dir.file("solver.json"), Json::object());
    fs::create_directories(dir.file("fit_out"));
    CHECK(run_cli("--out " + dir.file("fit_out") + " fit --data " + dir.file("sim_out/data.csv") +
                  " --config " + dir.file("solver.json")) == 0);

    const Matrix b_est = read_matrix_csv(dir.file("fit_out/b_est.csv"));
    CHECK(b_est.rows() == 5);
    CHECK(b_est.cols() == 5);
    const Json report = read_json_file(dir.file("fit_out/result.json"));
    for (const std::string key :
         {"converged", "valid", "h_final", "nll_final", "penalty_final", "b_est", "trace", "seconds",
          "method", "config"}) {
        CHECK(report.contains(key));
    }
    CHECK(report.at("method").get<std::string>() == "warm_start");
}

TEST_CASE("CLI fit rejects a singular covariance") {
    TempDir dir;
    write_text(dir.file("cov.csv"), "1,1\n1,1\n");
    write_json_file(dir.file("solver.json"), Json::object());
    CHECK(run_cli("fit --covariance --data " + dir.file("cov.csv") + " --config " +
                  dir.file("solver.json")) == 3);
}

TEST_CASE("CLI exact characterizes the two-node fixture") {
    TempDir dir;
    write_text(dir.file("cov.csv"), "1,-0.5\n-0.5,0.5\n");
    fs::create_directories(dir.file("out"));
    CHECK(run_cli("--out " + dir.file("out") + " exact --covariance --data " + dir.file("cov.csv")) ==
          0);

    const Json cls = read_json_file(dir.file("out/class.json"));
    CHECK(cls.at("p").get<int>() == 2);
    CHECK(cls.at("members").size() == 2);
    CHECK(cls.at("minimal_members").size() == 2);
    CHECK(cls.at("tau").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cls.at("delta0").get<double>() == doctest::Approx(0.25).epsilon(1e-12));
    const auto& member = cls.at("members").at(0);
    CHECK(member.contains("b"));
    CHECK(member.contains("omega"));
    CHECK(member.contains("orderings"));
    CHECK(member.at("edge_count").get<int>() == 1);
}

TEST_CASE("CLI exact refuses dimensions beyond the cap") {
    TempDir dir;
    std::ostringstream big;
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) big << (i == j ? "1" : "0") << (j + 1 < 12 ? "," : "");
        big << "\n";
    }
    write_text(dir.file("big.csv"), big.str());
    CHECK(run_cli("exact --covariance --data " + dir.file("big.csv")) == 4);
}

TEST_CASE("CLI eval reports structural metrics") {
    TempDir dir;
    write_text(dir.file("b_true.csv"), "0,1,1\n0,0,0\n0,0,0\n");
    write_text(dir.file("b_est.csv"), "0,0.9,0\n0,0,0\n0,0,0\n");
    fs::create_directories(dir.file("out"));
    CHECK(run_cli("--out " + dir.file("out") + " eval --b-est " + dir.file("b_est.csv") +
                  " --b-true " + dir.file("b_true.csv")) == 0);
    const Json metrics = read_json_file(dir.file("out/metrics.json"));
    CHECK(metrics.at("shd").get<int>() == 1);
    CHECK(metrics.at("valid").get<bool>());
    CHECK(metrics.at("edges_true").get<int>() == 2);
    CHECK(metrics.at("edges_est").get<int>() == 1);
    CHECK(metrics.at("skeleton_precision").get<double>() == doctest::Approx(1.0));
    CHECK(metrics.at("skeleton_recall").get<double>() == doctest::Approx(0.5));

    write_text(dir.file("b_small.csv"), "0,1\n0,0\n");
    CHECK(run_cli("eval --b-est " + dir.file("b_small.csv") + " --b-true " +
                  dir.file("b_true.csv")) == 2);
}

TEST_CASE("CLI bench runs a small grid deterministically") {
    TempDir dir;
    Json spec;
    spec["mode"] = "grid";
    spec["replicates"] = 2;
    spec["seed"] = 3;
    spec["cells"] = Json::array({Json{{"p", 5},
                                      {"k", 2},
                                      {"graph_kind", "ER"},
                                      {"model", "linear_gaussian"},
                                      {"n", 200}}});
    Json method;
    method["name"] = "ls_l1";
    method["fit_method"] = "single";
    method["solver"] =
        Json{{"score", "gaussian_ls"}, {"penalty", Json{{"family", "l1"}, {"lambda", 0.1}}}};
    spec["methods"] = Json::array({method});
    write_json_file(dir.file("spec.json"), spec);

    fs::create_directories(dir.file("r1"));
    CHECK(run_cli("--out " + dir.file("r1") + " bench --config " + dir.file("spec.json")) == 0);
    CHECK(fs::exists(dir.file("r1/per_replicate.csv")));
    CHECK(fs::exists(dir.file("r1/summary.csv")));

    const std::string per_rep = read_text(dir.file("r1/per_replicate.csv"));
    CHECK(per_rep.find("ls_l1") != std::string::npos);
    CHECK(per_rep.find("empty") != std::string::npos);

    fs::create_directories(dir.file("r2"));
    CHECK(run_cli("--out " + dir.file("r2") + " bench --config " + dir.file("spec.json")) == 0);
    CHECK(read_text(dir.file("r1/summary.csv")) == read_text(dir.file("r2/summary.csv")));

    write_json_file(dir.file("empty_spec.json"), Json{{"mode", "grid"}});
    CHECK(run_cli("bench --config " + dir.file("empty_spec.json")) == 2);
}
