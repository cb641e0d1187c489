#pragma once

#include "dagscore/types.hpp"

#include <string>

namespace dagscore {

enum class AcyclicityKind { TraceExpm, LogDet };

std::string to_string(AcyclicityKind kind);
AcyclicityKind acyclicity_kind_from_string(const std::string& name);

struct AcyclicitySpec {
    AcyclicityKind kind = AcyclicityKind::TraceExpm;
    double s = 1.0;

    void validate() const;
};

// TraceExpm: Tr(exp(B o B)) - p.
// LogDet: -log det(sI - B o B) + p log s; throws numerical_error when
// det(sI - B o B) <= 0.
double h_value(const AcyclicitySpec& spec, const Matrix& b);

// TraceExpm: exp(B o B)^T o 2B.  LogDet: 2 (sI - B o B)^{-T} o B.
Matrix h_grad(const AcyclicitySpec& spec, const Matrix& b);

// Exact combinatorial test: true iff the graph on entries |B_ij| > eps has a
// topological order.
bool is_dag(const Matrix& b, double eps);

}  // namespace dagscore
