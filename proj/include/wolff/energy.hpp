#pragma once

#include "wolff/lattice.hpp"
#include "wolff/measure.hpp"
#include "wolff/types.hpp"

#include <string>

namespace wolff {

// Affine k-plane: point + orthonormal basis of the tangent (d x k).
struct Plane {
  Vec point;
  Mat basis;
};

struct WolffReport {
  std::string measure_id;
  double s = 0.0;
  Index n = 0;
  double r_min = 0.0, r_max = 0.0;
  double wolff_integral = 0.0;
  double wolff_dyadic = 0.0;
  double growth_constant = 0.0;
};

// Scale-truncated Wolff energy of mu on the open region Q:
//   sum_{x in Q} w(x) * int_{r_min}^{r_max} (mu(Q cap B(x,r)) / r^s)^2 dr/r.
// For an atomic measure the inner integrand is piecewise constant between
// consecutive atom distances, so each piece integrates in closed form
// (int r^{-2s-1} dr); no quadrature is involved.  r_max may be +infinity.
// The outer sum is reduced pairwise for reproducibility.
double wolff_integral(const Measure& mu, const Box& region, double s, double r_min, double r_max);
double wolff_integral(const Measure& mu, const Cube& q, double s, double r_min, double r_max);

// Dyadic counterpart: sum over the view's cubes of density(Q)^2 * mass(Q).
double wolff_dyadic(const Measure& mu, const LatticeView& view, double s);

// Largest cube density over the view; arg_max (if wanted) receives the cube.
double growth_constant(const Measure& mu, const LatticeView& view, double s,
                       Cube* arg_max = nullptr);

// Discounted density maximand
//   sup { density(Q') * 2^(-eps*[Q':Q0]) : Q' in levels [m_min, m_max], x in Q' }.
// Cubes carrying no mass contribute zero, so only the view's level range
// matters, not its cube list.
double weak_density(const Measure& mu, const LatticeView& view, double s, double eps,
                    const Eigen::Ref<const Vec>& x);

// Mass of the level set E_T = { atoms x in 2*Q0 : weak_density(x) > T }.
double exceedance_mass(const Measure& mu, const LatticeView& view, double s, double eps, double T);

// Mass of mu within distance tol of the plane, restricted to the closed
// root cube [-1, 2]^d.  Domain error if the basis is not orthonormal.
double plane_mass_test(const Measure& mu, const Plane& plane, double tol);

// Convenience: full report over a region covering the support.
WolffReport wolff_report(const Measure& mu, const LatticeView& view, const Box& region, double s,
                         double r_min, double r_max);

}  // namespace wolff
