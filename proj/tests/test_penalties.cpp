#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dagscore/errors.hpp"
#include "dagscore/penalties.hpp"
#include "dagscore/rng.hpp"

#include "support/oracles.hpp"

#include <cmath>
#include <vector>

using namespace dagscore;

namespace {

std::vector<double> dense_grid(double lo, double hi, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    }
    return grid;
}

}  // namespace

TEST_CASE("quasi-MCP values") {
    const PenaltySpec pen = PenaltySpec::quasi_mcp(2.0, 1.0);
    CHECK(penalty_value(pen, 0.0) == 0.0);
    CHECK(penalty_value(pen, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(penalty_value(pen, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(penalty_value(pen, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(penalty_value(pen, -0.5) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("MCP values") {
    const PenaltySpec pen = PenaltySpec::mcp(1.0, 2.0);
    CHECK(penalty_value(pen, 0.0) == 0.0);
    CHECK(penalty_value(pen, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(penalty_value(pen, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("SCAD values") {
    const PenaltySpec pen = PenaltySpec::scad(1.0, 3.7);
    CHECK(penalty_value(pen, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(penalty_value(pen, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(penalty_value(pen, 2.0) == doctest::Approx(9.8 / 5.4).epsilon(1e-14));
    CHECK(penalty_value(pen, 3.7) == doctest::Approx(2.35).epsilon(1e-14));
    CHECK(penalty_value(pen, 10.0) == doctest::Approx(2.35).epsilon(1e-15));
}

TEST_CASE("L1 and L0 values") {
    const PenaltySpec l1 = PenaltySpec::l1(0.3);
    CHECK(penalty_value(l1, 2.0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(penalty_value(l1, -2.0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(penalty_grad(l1, 2.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(penalty_grad(l1, -2.0) == doctest::Approx(-0.3).epsilon(1e-15));
    CHECK(penalty_grad(l1, 0.0) == 0.0);
    CHECK(l1.differentiable());

    const PenaltySpec l0 = PenaltySpec::l0(0.7);
    CHECK(penalty_value(l0, 0.0) == 0.0);
    CHECK(penalty_value(l0, 1e-3) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(penalty_value(l0, -5.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_FALSE(l0.differentiable());
}

TEST_CASE("quasi-MCP gradient values") {
    const PenaltySpec pen = PenaltySpec::quasi_mcp(2.0, 1.0);
    CHECK(penalty_grad(pen, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(penalty_grad(pen, -0.5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(penalty_grad(pen, 0.0) == 0.0);
    CHECK(penalty_grad(pen, 1.0) == 0.0);
    CHECK(penalty_grad(pen, 4.0) == 0.0);
}

TEST_CASE("gradient vanishes on every plateau") {
    for (const PenaltySpec& pen : {PenaltySpec::quasi_mcp(1.3, 0.4),
                                   PenaltySpec::mcp(1.3, 0.4),
                                   PenaltySpec::scad(0.4, 2.5)}) {
        const double far = 5.0 * pen.shape * std::max(1.0, pen.lambda);
        CHECK(penalty_grad(pen, far) == 0.0);
        CHECK(penalty_grad(pen, -far) == 0.0);
        CHECK(penalty_value(pen, far) == doctest::Approx(penalty_value(pen, 2.0 * far)).epsilon(1e-15));
    }
}

TEST_CASE("penalties are even and nondecreasing in magnitude") {
    Rng rng(31);
    for (const PenaltySpec& pen : {PenaltySpec::quasi_mcp(0.9, 0.3),
                                   PenaltySpec::mcp(0.9, 1.7),
                                   PenaltySpec::scad(0.9, 3.7),
                                   PenaltySpec::l1(0.9),
                                   PenaltySpec::l0(0.9)}) {
        double prev = 0.0;
        for (double t = 0.0; t <= 4.0; t += 0.01) {
            const double v = penalty_value(pen, t);
            CHECK(v == penalty_value(pen, -t));
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
        for (int rep = 0; rep < 50; ++rep) {
            const double t = rng.uniform(-3.0, 3.0);
            CHECK(penalty_grad(pen, t) == doctest::Approx(-penalty_grad(pen, -t)).epsilon(1e-13));
        }
    }
}

TEST_CASE("quasi-MCP is linear in lambda") {
    Rng rng(32);
    for (int rep = 0; rep < 100; ++rep) {
        const double lambda = rng.uniform(0.1, 2.0);
        const double delta = rng.uniform(0.1, 2.0);
        const double c = rng.uniform(0.5, 3.0);
        const double t = rng.uniform(-3.0, 3.0);
        const PenaltySpec base = PenaltySpec::quasi_mcp(lambda, delta);
        const PenaltySpec scaled = PenaltySpec::quasi_mcp(c * lambda, delta);
        CHECK(penalty_value(scaled, t) == doctest::Approx(c * penalty_value(base, t)).epsilon(1e-12));
    }
}

TEST_CASE("gradients match central differences away from kinks") {
    Rng rng(33);
    const std::vector<PenaltySpec> pens = {PenaltySpec::quasi_mcp(1.1, 0.6),
                                           PenaltySpec::mcp(1.1, 2.2),
                                           PenaltySpec::scad(1.1, 3.7),
                                           PenaltySpec::l1(1.1)};
    int checked = 0;
    while (checked < 1000) {
        const PenaltySpec& pen = pens[rng.uniform_int(pens.size())];
        const double t = rng.uniform(-4.0, 4.0);
        const double margin = 1e-3;
        if (std::abs(t) < margin) continue;
        bool near_kink = false;
        for (const double kink : {pen.shape, pen.lambda, pen.shape * pen.lambda}) {
            if (std::abs(std::abs(t) - kink) < margin) near_kink = true;
        }
        if (near_kink) continue;
        const double numeric =
            oracles::central_difference([&](double u) { return penalty_value(pen, u); }, t, 1e-6);
        CHECK(penalty_grad(pen, t) == doctest::Approx(numeric).epsilon(1e-6));
        ++checked;
    }
}

TEST_CASE("MCP reparameterization holds exactly when delta equals a lambda") {
    const std::vector<double> grid = dense_grid(-2.0, 2.0, 801);
    CHECK(mcp_reparam_check(2.0, 0.5, grid));
    CHECK(mcp_reparam_check(0.1, 3.0, grid));
    CHECK(mcp_reparam_check(1.0, 1.0, grid));
}

TEST_CASE("MCP reparameterization fails for mismatched shape") {
    const PenaltySpec qmcp = PenaltySpec::quasi_mcp(1.0, 0.9);
    const PenaltySpec mcp = PenaltySpec::mcp(1.0, 2.0);
    bool differs = false;
    for (const double t : dense_grid(-2.0, 2.0, 801)) {
        if (std::abs(penalty_value(qmcp, t) - penalty_value(mcp, t)) > 1e-8) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("mcp_reparam_check validates its arguments") {
    const std::vector<double> grid = {0.0, 1.0};
    CHECK_THROWS_AS((void)mcp_reparam_check(0.0, 1.0, grid), validation_error);
    CHECK_THROWS_AS((void)mcp_reparam_check(1.0, -1.0, grid), validation_error);
}

TEST_CASE("penalty_matrix sums off-diagonal entries") {
    const PenaltySpec pen = PenaltySpec::quasi_mcp(1.0, 0.1);
    CHECK(penalty_matrix(pen, Matrix::Zero(3, 3)) == 0.0);

    Matrix b = Matrix::Zero(2, 2);
    b(0, 1) = -0.5;
    CHECK(penalty_matrix(pen, b) == doctest::Approx(0.05).epsilon(1e-14));

    // Diagonal entries never contribute even when nonzero.
    Matrix with_diag = b;
    with_diag(0, 0) = 7.0;
    with_diag(1, 1) = -7.0;
    CHECK(penalty_matrix(pen, with_diag) == doctest::Approx(0.05).epsilon(1e-14));

    Matrix all_large = Matrix::Constant(3, 3, 5.0);
    CHECK(penalty_matrix(pen, all_large) == doctest::Approx(6.0 * 0.05).epsilon(1e-13));
}

TEST_CASE("penalty_matrix_grad matches elementwise gradients with zero diagonal") {
    Rng rng(34);
    const PenaltySpec pen = PenaltySpec::mcp(0.8, 1.5);
    Matrix b(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) b(i, j) = rng.uniform(-2.0, 2.0);
    }
    const Matrix g = penalty_matrix_grad(pen, b);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) {
                CHECK(g(i, j) == 0.0);
            } else {
                CHECK(g(i, j) == doctest::Approx(penalty_grad(pen, b(i, j))).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("factories and validate reject bad parameters") {
    CHECK_THROWS_AS((void)PenaltySpec::l1(-0.1), validation_error);
    CHECK_THROWS_AS((void)PenaltySpec::quasi_mcp(1.0, 0.0), validation_error);
    CHECK_THROWS_AS((void)PenaltySpec::mcp(1.0, -2.0), validation_error);
    CHECK_THROWS_AS((void)PenaltySpec::scad(1.0, 1.0), validation_error);
    CHECK_NOTHROW((void)PenaltySpec::quasi_mcp(0.0, 1.0));

    PenaltySpec bad;
    bad.family = PenaltyFamily::Scad;
    bad.lambda = 1.0;
    bad.shape = 0.5;
    CHECK_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("uses_shape distinguishes families") {
    CHECK(PenaltySpec::quasi_mcp(1.0, 1.0).uses_shape());
    CHECK(PenaltySpec::mcp(1.0, 2.0).uses_shape());
    CHECK(PenaltySpec::scad(1.0, 3.7).uses_shape());
    CHECK_FALSE(PenaltySpec::l1(1.0).uses_shape());
    CHECK_FALSE(PenaltySpec::l0(1.0).uses_shape());
}

TEST_CASE("family names round-trip") {
    for (const PenaltyFamily family : {PenaltyFamily::QuasiMcp, PenaltyFamily::Mcp,
                                       PenaltyFamily::Scad, PenaltyFamily::L1, PenaltyFamily::L0}) {
        CHECK(penalty_family_from_string(to_string(family)) == family);
    }
    CHECK_THROWS_AS((void)penalty_family_from_string("huber"), validation_error);
}
