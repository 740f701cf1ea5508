#pragma once

#include "wolff/kernels.hpp"
#include "wolff/lattice.hpp"
#include "wolff/measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wolff {

// Discrete Lipschitz bump adapted to an axis-aligned box: values live on a
// subset of the measure's atoms, the pairwise increments are bounded by
// lip_bound times the distance, and each value is capped by lip_bound times
// the distance to the boundary of the support box (so the function extends
// to one vanishing outside the box with the same Lipschitz constant).
struct LipFunction {
  std::vector<Index> nodes;  // atom indices into the measure
  Vec values;                // one value per node
  double lip_bound = 0.0;
  Box support;
};

// Empty when the Lipschitz, boundary-cap, and mean-zero constraints all hold
// up to `tol` (relative to the natural scale lip_bound * diam(support));
// otherwise a description of the first violation.
std::optional<std::string> lip_violation(const Measure& mu, const LipFunction& psi,
                                         double tol = 1e-7);

struct ThetaOptions {
  bool scaled_pairing = true;  // pair against the side-length-rescaled convolution
  Index node_cap = 2000;       // deterministic stride subsample above this count
  int max_rounds = 500;        // cutting-plane iterations
  double cut_tol = 1e-10;      // violation threshold (relative) for adding rows
};

struct ThetaResult {
  double value = 0.0;        // certified objective of the returned witness
  LipFunction witness;       // feasible to ~1e-12, mean-zero
  double lp_residual = 0.0;  // |raw LP optimum - value| / max(value, 1)
  Index n_nodes = 0;
  bool subsampled = false;
  int rounds = 0;  // cutting-plane passes used
};

// Oscillation coefficient of mu on the dilate A*Q against the odd bump phi:
// the maximum of |sum_i t_i v_i w_i| over mean-zero discrete Lipschitz bumps
// v adapted to A*Q with constant 1/side(Q), where t is the convolution of mu
// with phi at scale side(Q) (rescaled by side^-s when scaled_pairing is set,
// plain otherwise).  Solved as a linear program with lazily generated
// pairwise rows; both objective signs are solved and the larger optimum wins.
ThetaResult theta(const Measure& mu, const Cube& q, const SmoothBump& phi, double A, double s,
                  const ThetaOptions& opts = {});

struct CubePsi {
  Cube cube;
  LipFunction psi;
};

// sum_Q <g, psi_Q>_mu^2 / mu(3A Q) divided by ||g||_mu^2.  Every psi_Q is
// re-verified against the constraints of its cube (support box A*Q, Lipschitz
// constant at most 1/side(Q)); a violation is a domain error naming the cube.
double riesz_system_test(const Measure& mu, const std::vector<CubePsi>& system, double A,
                         const Vec& g, double tol = 1e-7);

struct GoalARow {
  Cube cube;
  int best_phi = -1;    // index into the family achieving the max
  double theta = 0.0;   // max over the family
  double denom = 0.0;   // D(Q) * mu(Q)
  double ratio = 0.0;   // theta / denom
  double lp_residual = 0.0;
  Index n_nodes = 0;
};

struct GoalAReport {
  std::vector<GoalARow> rows;
  double min_ratio = 0.0;
  double delta = 0.0;
  bool pass = false;  // min_ratio >= delta over all rows
};

// For each cube, the best oscillation coefficient over the test family and
// its ratio against D(Q) * mu(Q); pass iff the worst ratio clears delta.
GoalAReport goal_A_test(const Measure& mu, const std::vector<Cube>& selected,
                        const TestFunctionFamily& family, double A, double delta, double s,
                        const ThetaOptions& opts = {});

}  // namespace wolff
