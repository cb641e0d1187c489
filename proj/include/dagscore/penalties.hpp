#pragma once

#include "dagscore/types.hpp"

#include <string>
#include <vector>

namespace dagscore {

enum class PenaltyFamily { QuasiMcp, Mcp, Scad, L1, L0 };

std::string to_string(PenaltyFamily family);
PenaltyFamily penalty_family_from_string(const std::string& name);

// shape is delta for QuasiMcp, a for Mcp/Scad, ignored for L1/L0.
struct PenaltySpec {
    PenaltyFamily family = PenaltyFamily::QuasiMcp;
    double lambda = 0.0;
    double shape = 1.0;

    static PenaltySpec quasi_mcp(double lambda, double delta);
    static PenaltySpec mcp(double lambda, double a);
    static PenaltySpec scad(double lambda, double a);
    static PenaltySpec l1(double lambda);
    static PenaltySpec l0(double lambda);

    void validate() const;
    bool uses_shape() const;
    bool differentiable() const { return family != PenaltyFamily::L0; }
};

double penalty_value(const PenaltySpec& spec, double t);

// Subgradient choice 0 at kinks (t = 0 for all families; branch boundaries
// are smooth for QuasiMcp/Mcp and handled by the flat side for Scad).
double penalty_grad(const PenaltySpec& spec, double t);

// Sum of penalty_value over off-diagonal entries of B.
double penalty_matrix(const PenaltySpec& spec, const Matrix& b);

// Elementwise penalty_grad with zero diagonal.
Matrix penalty_matrix_grad(const PenaltySpec& spec, const Matrix& b);

// True iff QuasiMcp(lambda, a*lambda) and Mcp(lambda, a) agree within 1e-14
// at every grid point.
bool mcp_reparam_check(double lambda, double a, const std::vector<double>& grid);

}  // namespace dagscore
