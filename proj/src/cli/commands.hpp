#pragma once

#include <ostream>

#include "cli/config.hpp"
#include "erk/scalar_conditions.hpp"

namespace erk::cli {

struct SimulateSummary {
  int steps = 0;
  double final_entropy = 0.0;
};

/// Writes config.txt, entropy.csv (t,H,mass,min,max,iters), snapshot CSVs and
/// status.txt under cfg.out. Rows are flushed per step; on a failing step
/// status.txt records the error and the error is rethrown.
SimulateSummary cmd_simulate(const RunConfig& cfg, std::ostream& log);

/// One gprofile_<scheme>_t<base>.csv per profiled scheme and base time. Base
/// states come from running cfg.scheme to each base time.
int cmd_gprofile(const RunConfig& cfg, std::ostream& log);

/// region_<family>_d<d>_c<c_rk>.csv; returns the number of member cells.
int cmd_region(const RunConfig& cfg, std::ostream& log);

/// conditions.csv plus a per-condition summary on `log`; returns the rows.
std::vector<ConditionRow> cmd_check_conditions(const RunConfig& cfg, std::ostream& log);

/// Prints the exact DLSS identities with PASS/FAIL; true when all pass.
bool cmd_dlss_constants(std::ostream& log);

}  // namespace erk::cli
