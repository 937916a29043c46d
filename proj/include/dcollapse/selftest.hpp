#pragma once

#include <iosfwd>

namespace dcollapse {

/// Runs the analytic-vs-quadrature and statistical self-checks, printing one
/// PASS/FAIL line each. Returns true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace dcollapse
