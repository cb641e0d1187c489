#pragma once

#include "dagscore/simulation.hpp"
#include "dagscore/solver.hpp"
#include "dagscore/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dagscore {

using Json = nlohmann::json;

// Shortest round-trip decimal representation, dot separator.
std::string format_double(double value);

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

Vector read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Vector& v);

// A first line with any non-numeric field is treated as a header row.
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& data);

// Writes through a temp file in the same directory, renamed on completion.
void write_file_atomic(const std::string& path, const std::string& content);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

Json to_json(const PenaltySpec& spec);
PenaltySpec penalty_spec_from_json(const Json& j);

Json to_json(const AcyclicitySpec& spec);
AcyclicitySpec acyclicity_spec_from_json(const Json& j);

Json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const Json& j);

Json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const Json& j);

Json to_json(const SolveResult& result);

}  // namespace dagscore
