#pragma once

#include <ostream>
#include <vector>

#include "musobench/model.hpp"

namespace musobench {

// Hand-checked reference instances small enough to verify on paper. Their
// expected solution listings are frozen here so the solver, the exhaustive
// scan, and the answer formatter can all be validated against one ground.

TimeTablingInstance reference_timetabling_instance();
SubsetSumInstance reference_subsetsum_instance();

/// All five subsets of the reference instance, in the solver's canonical
/// emission order.
SolutionSet reference_subsetsum_solutions();

/// Three of the reference instance's six schedules, independently verified
/// by hand against the constraints.
std::vector<ScheduleSolution> reference_timetabling_known();

/// Runs the built-in verification battery, printing one line per check.
/// Returns the number of failed checks.
int run_selftest(std::ostream& out);

}  // namespace musobench
