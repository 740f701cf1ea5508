#pragma once

#include "wolff/measure.hpp"
#include "wolff/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wolff {

// A lattice cube: the concentric open triple of the half-open dyadic cube
// prod_i [k_i 2^m, (k_i+1) 2^m).  Its side is 3*2^m; the root cube (level 0,
// corner 0) is (-1, 2)^d.  Levels are clamped to |m| <= 40 and corners to
// |k| <= 2^50 so every endpoint (k +/- const)*2^m is exactly representable
// as a double and all geometric comparisons below are exact.
struct Cube {
  int level = 0;
  std::vector<long long> corner;

  Cube() = default;
  Cube(int level_, std::vector<long long> corner_);

  int dim() const { return static_cast<int>(corner.size()); }
  double dyadic_side() const { return std::ldexp(1.0, level); }
  double side() const { return 3.0 * dyadic_side(); }
  Vec center() const;

  // The open cube itself (the triple of the underlying dyadic cube) and its
  // concentric dilation a*Q.
  Box box() const;
  Box dilated(double a) const { return box().dilated(a); }

  bool operator==(const Cube& o) const { return level == o.level && corner == o.corner; }
  bool operator!=(const Cube& o) const { return !(*this == o); }
};

// Deterministic total order: level descending (coarse first), corner
// lexicographic ascending.
bool cube_less(const Cube& a, const Cube& b);

// Root cube Q0 = (-1, 2)^d.
Cube root_cube(int d);

// Text codec "m:k1,k2,...,kd".
std::string format_cube(const Cube& q);
Cube parse_cube(const std::string& text);

// Triple of the unique dyadic cube with 4x the side containing the
// underlying cube.  It contains a*Q for a <= 3 and hence every cube of side
// <= side(Q) that intersects Q.
Cube grandparent(const Cube& q);

// Side ratio exponent [Q':Q] = |log2(side(Q')/side(Q))| = |m' - m|.
double ratio(const Cube& a, const Cube& b);

// Exact open-box containment of triples.
bool cube_contains(const Cube& outer, const Cube& inner);

// Mass of the open triple and the density mass / side^s.
double mass_cube(const Measure& mu, const Cube& q);
double density(const Measure& mu, const Cube& q, double s);

// Corners of all level-m cubes whose open triple contains p (at most 3^d).
std::vector<Cube> cubes_containing(const Eigen::Ref<const Vec>& p, int level);

// Enumeration of every cube in a level range whose triple meets the support
// of mu (optionally restricted to triples meeting a spatial box), sorted by
// cube_less.
struct LatticeView {
  int m_min = 0, m_max = 0;
  std::vector<Cube> cubes;

  // Index of q in cubes, if present.
  std::optional<size_t> find(const Cube& q) const;
};

LatticeView enumerate_cubes(const Measure& mu, int m_min, int m_max,
                            const std::optional<Box>& restrict_to = std::nullopt);

// Pushforward of mu under the inverse of the canonical map L_Q (the
// similarity sending Q0 to Q), normalized so the image of Q carries unit
// mass: atoms p |-> p*2^-m - k, weights divided by mass_cube(mu, Q).
Measure rescale_normalize(const Measure& mu, const Cube& q);

}  // namespace wolff
