#pragma once

#include "wolff/lattice.hpp"
#include "wolff/measure.hpp"
#include "wolff/types.hpp"

#include <optional>
#include <vector>

namespace wolff {

struct SelectionOptions {
  double s = 0.5;
  double eps = 0.1;
  // Bunch search: exhaustive below `exact_threshold` candidates, greedy with
  // local swaps above (those results are flagged), hard failure above `cap`.
  size_t exact_threshold = 20;
  size_t candidate_cap = 4096;
};

// Q' dominates Q from above: Q' strictly contains Q (as open triples) and
// density(Q') >= 2^(eps*[Q':Q]) * density(Q).
bool dominates_above(const Measure& mu, const Cube& outer, const Cube& q, double s, double eps);

struct SelectionResult {
  // Aligned with view.cubes.
  std::vector<double> mass;
  std::vector<double> density;
  std::vector<char> selected;        // member of D_sel
  std::vector<int> certificate;      // rejected cubes: view index of the
                                     // dominating cube of largest side
                                     // (ties: lexicographically first corner);
                                     // -1 for selected cubes
  std::vector<char> search_truncated;  // dominators may exist above m_max
  double energy_total = 0.0;         // sum of density^2 * mass over all cubes
  double energy_selected = 0.0;      // same sum over D_sel
  bool complete = true;              // false iff any search_truncated entry
};

// D_sel: cubes of the view not dominated from above by any enumerated cube.
// The per-cube dominator search is cut off at the level beyond which even a
// cube carrying the whole measure would be too thin to dominate; if that
// level exceeds the view's m_max the result is marked incomplete.
SelectionResult select_upward(const Measure& mu, const LatticeView& view,
                              const SelectionOptions& opts);

// Doubling ratio mass(M*Q) / (M^(s+eps) * mass(Q)); domain error if Q
// carries no mass.
double doubling_check(const Measure& mu, const Cube& q, double M, double s, double eps);

// A bunch dominating Q from below: members Q_j in D_sel with
//   density(Q_j) >= 2^(eps*[Q:Q_j]) * density(Q),
//   3*Q_j pairwise disjoint and contained in 3*Q, and
//   sum_j density(Q_j)^2 * 2^(-2*eps*[Q:Q_j]) * mass(Q_j) >= density(Q)^2 * mass(Q).
struct Bunch {
  size_t target = 0;             // view index of Q
  std::vector<size_t> members;   // view indices of the Q_j
  double lhs = 0.0, rhs = 0.0;   // the two sides of the mass condition
};

struct BunchSearch {
  std::optional<Bunch> bunch;
  bool exact = true;   // false when the greedy path was used, in which case
                       // an empty result does not prove no bunch exists
  size_t candidates = 0;
};

// Search for a nontrivial dominating bunch for view cube `target`.
// Capacity error if the candidate list exceeds opts.candidate_cap.
BunchSearch find_bunch(const Measure& mu, const LatticeView& view, const SelectionResult& upward,
                       size_t target, const SelectionOptions& opts);

struct DownwardResult {
  std::vector<char> selected;              // member of D_hat_sel (subset of D_sel)
  std::vector<std::optional<Bunch>> bunch; // certificate for rejected cubes
  std::vector<char> uncertified;           // kept only because a greedy search
                                           // found nothing (not a proof)
  double energy_total = 0.0;               // sum over D_sel
  double energy_selected = 0.0;            // sum over D_hat_sel
  bool exact = true;
};

// D_hat_sel: cubes of D_sel admitting no nontrivial dominating bunch.
DownwardResult select_downward(const Measure& mu, const LatticeView& view,
                               const SelectionResult& upward, const SelectionOptions& opts);

}  // namespace wolff
