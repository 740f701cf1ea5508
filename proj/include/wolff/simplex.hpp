#pragma once

#include "wolff/types.hpp"

namespace wolff {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  double value = 0.0;  // c^T x at the optimum
  Vec x;
};

// Dense two-phase tableau simplex for
//     maximize c^T x   s.t.   A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
// Dantzig pricing with an automatic switch to Bland's rule after a run of
// degenerate pivots; rows are equilibrated before solving.  Numeric error if
// the iteration cap is exceeded.  Intended for the moderate sizes produced
// by the oscillation module's constraint generation (hundreds of variables).
LpResult solve_lp_max(const Vec& c, const Mat& A_ub, const Vec& b_ub, const Mat& A_eq,
                      const Vec& b_eq);

}  // namespace wolff
