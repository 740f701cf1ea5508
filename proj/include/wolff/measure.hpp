#pragma once

#include "wolff/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wolff {

// Declarative description of a point-cloud measure.  Parsed from JSON; every
// family is deterministic (no hidden randomness), so regenerating from the
// same spec reproduces the measure bit for bit.
struct MeasureSpec {
  std::string id;
  std::string family;  // "cantor" | "lebesgue-cube" | "plane-lattice" | "custom-points"
  int d = 1;

  // cantor: 2^(d*n) equally weighted atoms at the lower corners of the
  // generation-n cubes of the corner construction with contraction lambda.
  double lambda = 0.25;
  int generations = 0;
  double scale = 1.0;
  double total = 1.0;

  // lebesgue-cube: resolution^d cell centers of [0, side]^d + origin,
  // each weighted by the cell volume.
  double side = 1.0;
  int resolution = 1;

  // plane-lattice: k-planes (spanned by the first k axes) stacked on the
  // lattice spacing*{-count..count}^(d-k) of the remaining axes; each plane
  // is a midpoint grid over [-extent, extent]^k with `plane_resolution`
  // cells per axis, carrying weight pattern[(sum of indices) mod |pattern|]
  // times the cell k-volume.  `stagger` shifts each plane's grid by a
  // deterministic sub-cell offset (breaks exact grid alignment on purpose).
  int plane_dim = 1;
  double spacing = 1.0;
  int count = 1;
  double extent = 1.0;
  int plane_resolution = 1;
  std::vector<double> pattern = {1.0};
  bool stagger = false;

  // custom-points
  Mat points;   // d x n
  Vec weights;  // n

  Vec origin;  // shared by cantor / lebesgue-cube; defaults to 0

  static MeasureSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
};

// Immutable weighted point cloud with an exact spatial index.
//
// Atoms are canonicalized at construction (sorted lexicographically by
// coordinates, then weight), so two Measures built from the same multiset of
// atoms are identical regardless of input order.  Mass queries accumulate
// weights in storage order by walking a bounding-volume tree; the returned
// sums are bit-identical to a brute-force scan in storage order.
class Measure {
 public:
  Measure() = default;
  Measure(Mat points, Vec weights, std::string id = "");

  int dim() const { return static_cast<int>(points_.rows()); }
  Index size() const { return points_.cols(); }
  const Mat& points() const { return points_; }
  const Vec& weights() const { return weights_; }
  Vec point(Index i) const { return points_.col(i); }
  double weight(Index i) const { return weights_[i]; }
  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }

  double total_mass() const { return total_mass_; }

  // Mass of the open Euclidean ball / open box (strict comparisons).
  double mass_ball(const Eigen::Ref<const Vec>& center, double r) const;
  double mass_box(const Box& box) const;

  // Indices (ascending) of atoms strictly inside the region.
  std::vector<Index> atoms_in_ball(const Eigen::Ref<const Vec>& center, double r) const;
  std::vector<Index> atoms_in_box(const Box& box) const;

  // Closed bounding box of the support.
  Box support_box() const;

  // Smallest positive pairwise atom distance (nullopt when none exists) and
  // support diameter; both cached after the first O(n^2) scan.
  std::optional<double> min_gap() const;
  double diameter() const;

  // Default truncation scales: r_min = half the smallest positive pairwise
  // distance (domain error if none), r_max = twice the support diameter.
  double default_r_min() const;
  double default_r_max() const;

 private:
  struct Node {
    Index begin = 0, end = 0;
    int left = -1, right = -1;
    Vec blo, bhi;
  };

  int build_node(Index begin, Index end);
  void scan_pairs() const;

  template <class Inside, class NodeInside, class NodeDisjoint, class Visit>
  void query(const Inside&, const NodeInside&, const NodeDisjoint&, const Visit&) const;

  Mat points_;
  Vec weights_;
  std::string id_;
  double total_mass_ = 0.0;
  std::vector<Node> nodes_;
  mutable bool pairs_scanned_ = false;
  mutable std::optional<double> min_gap_;
  mutable double diameter_ = 0.0;
};

// Build the measure described by a spec (parameter errors on invalid or
// oversized requests).
Measure generate(const MeasureSpec& spec);

// Text serialization: "# d=<d> n=<count>" header, then one atom per line
// (coordinates then weight, printf %.17g, so round-trips are exact).
void save_measure(std::ostream& os, const Measure& mu);
Measure load_measure(std::istream& is, const std::string& id = "");
void save_measure_file(const std::string& path, const Measure& mu);
Measure load_measure_file(const std::string& path);

}  // namespace wolff
