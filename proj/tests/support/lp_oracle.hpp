#pragma once

#include <vector>

namespace oracle {

// Dense two-phase simplex: minimize c.x subject to A x >= b, x >= 0, with b >= 0.
// Returns the optimal x; throws std::runtime_error when infeasible or unbounded.
std::vector<double> lp_minimize(const std::vector<double>& c, const std::vector<std::vector<double>>& A,
                                const std::vector<double>& b);

}  // namespace oracle
