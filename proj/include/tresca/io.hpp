#pragma once

#include "tresca/coupled.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace tresca {

/// JSON number, or the strings "inf", "-inf", "nan" for non-finite values.
nlohmann::json json_number(double value);
nlohmann::json json_vector(const std::vector<double>& values);

nlohmann::json constants_json(const EstimateConstants& c);

/// Everything in report.json: norms, constants, per-stage metrics,
/// tolerances, seed and config hash. No timings, so equal inputs give equal
/// bytes.
nlohmann::json report_json(const CoupledProblem& problem, const CoupledResult& result);

/// Mesh cells and facet tags plus point data velocity (v + G), pressure,
/// temperature.
void write_fields_vtk(const CoupledProblem& problem, const CoupledState& state, std::ostream& out);

/// One row per Gamma0 point: x' coordinates, sigma_n, sigma_tau components,
/// |sigma_tau|, k, stick/slip.
void write_traction_csv(const CoupledProblem& problem, const CoupledState& state, std::ostream& out);

/// fields.vtk, gamma0_traction.csv and report.json under out_dir (created
/// when missing).
void write_solution(const CoupledProblem& problem, const CoupledResult& result,
                    const std::string& out_dir);

/// Shortest round-trip decimal text of a double.
std::string format_double(double value);

}  // namespace tresca
