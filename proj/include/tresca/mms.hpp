#pragma once

#include "tresca/types.hpp"

#include <string>
#include <vector>

namespace tresca {

struct MmsLevel {
  int resolution = 0;
  double h = 0.0;      ///< largest cell diameter
  double error = 0.0;  ///< gradient-seminorm error in L^2 (heat) or L^p (flow)
};

struct MmsResult {
  std::string name;
  double p = 2.0;
  std::vector<MmsLevel> levels;
  std::vector<double> orders;  ///< between consecutive levels
  double required_order = 0.0;
  bool require_decrease = false;
  bool passed = false;
};

/// "heat", "stokes_p2", "plap_p1.5", "plap_p3".
const std::vector<std::string>& mms_cases();

/// Manufactured-solution study on the unit square, resolutions
/// base_resolution * 2^i for i < levels. Throws DomainError for an unknown
/// case name or fewer than two levels.
MmsResult run_mms(const std::string& name, int levels, int base_resolution = 4,
                  Execution exec = Execution::parallel);

}  // namespace tresca
