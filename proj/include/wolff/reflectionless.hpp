#pragma once

#include "wolff/kernels.hpp"
#include "wolff/measure.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wolff {

// Candidate description of a measure as a symmetric lattice of weighted
// k-planes: an orthonormal basis of the plane direction V, a finite set of
// base points orthogonal to V, one nonnegative weight per base point, and
// the bounded observation window all symmetry statements are relative to.
struct StructureHypothesis {
  Mat basis;    // d x k, orthonormal columns spanning V
  Mat points;   // d x m, base points of E (orthogonal to V)
  Vec weights;  // m nonnegative weights f
  Box window;

  int dim() const { return static_cast<int>(basis.rows()); }
  int plane_dim() const { return static_cast<int>(basis.cols()); }

  static StructureHypothesis from_json_text(const std::string& text);
  std::string to_json_text() const;
};

StructureHypothesis load_hypothesis(const std::string& path);
void save_hypothesis(const StructureHypothesis& hyp, const std::string& path);

struct DefectReport {
  double defect = 0.0;     // max |T(x) - reference| over window atoms
  double reference = 0.0;  // median of T over window atoms
  Index count = 0;         // atoms inside the window
};

// Constancy defect of the plain convolution T(x) = sum_j phi(x - x_j) w_j
// over the atoms inside the (already shrunken) window, measured against the
// window median.  Domain error when no atom lies in the window.
DefectReport reflectionless_defect(const Measure& mu, const SmoothBump& phi, const Box& window);

// mass_ball(mu, x + z, r) - mass_ball(mu, x - z, r).
double ball_difference(const Measure& mu, const Vec& x, const Vec& z, double r);

struct ClosureOptions {
  Index max_points = 4096;      // growth cap; exceeding it sets `truncated`
  double spacing_floor = 1e-6;  // uniform-discreteness threshold
  double merge_tol = 1e-9;      // coordinates closer than this merge
};

struct ClosureResult {
  std::vector<Vec> points;
  double min_spacing = 0.0;        // over the final set (0 when < 2 points)
  bool uniformly_discrete = true;  // min_spacing >= spacing_floor
  bool truncated = false;          // hit max_points before the fixed point
  int sweeps = 0;
};

// Closes the point set under arithmetic progressions x + k(y - x), k integer,
// truncated to the closed window, iterating until no new point appears.  With
// an empty `pairs` list every pair of current points generates; otherwise only
// the supplied index pairs into the original set do.
ClosureResult reflection_closure(const std::vector<Vec>& support,
                                 const std::vector<std::pair<Index, Index>>& pairs,
                                 const Box& window, const ClosureOptions& opts = {});

struct Violation {
  std::string check;     // plane-distance | uniform-mass | discreteness | symmetry-set |
                         // symmetry-weight | orthogonality
  std::string location;  // formatted point or index
  double magnitude = 0.0;
};

struct VerifyOptions {
  double ball_radius = 0.0;  // <= 0: use 1.7 x the minimal atom gap
  Index max_listed = 100;    // cap on retained violation rows
};

struct StructureReport {
  std::vector<Violation> violations;
  Index violation_count = 0;  // total, including rows past max_listed
  double max_plane_distance = 0.0;
  double mass_spread = 0.0;  // worst relative per-plane ball-mass spread
  double min_base_spacing = 0.0;
  bool pass = false;
};

// Checks that (a) every atom sits within tol of some hypothesized plane,
// (b) ball masses at interior support points of each plane agree within tol
// (relative), and (c) the base set and weights are uniformly discrete and
// symmetric about each base point within the window.
StructureReport verify_structure(const Measure& mu, const StructureHypothesis& hyp, double tol,
                                 const VerifyOptions& opts = {});

// floor(s) < k < floor(s) + 1 — empty for every integer plane dimension k,
// which is exactly the contradiction the verification pipeline exhibits.
bool dimension_window_check(const StructureHypothesis& hyp, const Ambient& ambient);

// The hypothesis a plane-lattice measure spec is built to satisfy: V spans
// the first plane_dim axes, the base points are the lattice offsets with the
// pattern weights, and the window clips at half a spacing beyond the stack.
StructureHypothesis plane_lattice_hypothesis(const MeasureSpec& spec);

}  // namespace wolff
