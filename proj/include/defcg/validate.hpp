#pragma once

#include <cstdint>
#include <iosfwd>

namespace defcg {

/// Runs the solver, recycling and GPC invariants on small random instances
/// and prints one PASS/FAIL line per check. Returns true when all pass.
bool run_validation(std::uint64_t seed, std::ostream& out);

}  // namespace defcg
