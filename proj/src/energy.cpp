#include "wolff/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wolff {

namespace {

// int_a^b r^(-2s-1) dr = (a^(-2s) - b^(-2s)) / (2s), valid for 0 < a <= b,
// b possibly infinite.
double tail_integral(double a, double b, double s) {
  if (!(a < b)) return 0.0;
  double hi = std::isinf(b) ? 0.0 : std::pow(b, -2.0 * s);
  return (std::pow(a, -2.0 * s) - hi) / (2.0 * s);
}

}  // namespace

double wolff_integral(const Measure& mu, const Box& region, double s, double r_min, double r_max) {
  if (!(s > 0.0)) fail_parameter("wolff_integral: s must be positive");
  if (!(r_min > 0.0) || !(r_min < r_max)) fail_parameter("wolff_integral: need 0 < r_min < r_max");

  const std::vector<Index> inside = mu.atoms_in_box(region);
  if (inside.empty()) return 0.0;

  std::vector<double> contributions;
  contributions.reserve(inside.size());
  std::vector<std::pair<double, double>> dist_weight(inside.size());

  for (Index x : inside) {
    const Vec cx = mu.point(x);
    for (size_t j = 0; j < inside.size(); ++j) {
      dist_weight[j] = {(mu.point(inside[j]) - cx).norm(), mu.weight(inside[j])};
    }
    std::sort(dist_weight.begin(), dist_weight.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // mu(Q cap B(x, r)) equals the cumulative weight of atoms at distance
    // < r; between consecutive distinct distances it is constant.
    double acc = 0.0;
    double cum = 0.0;
    size_t j = 0;
    while (j < dist_weight.size()) {
      const double t = dist_weight[j].first;
      while (j < dist_weight.size() && dist_weight[j].first == t) {
        cum += dist_weight[j].second;
        ++j;
      }
      const double t_next = j < dist_weight.size() ? dist_weight[j].first
                                                   : std::numeric_limits<double>::infinity();
      const double a = std::max(t, r_min);
      const double b = std::min(t_next, r_max);
      if (a < b) acc += cum * cum * tail_integral(a, b, s);
    }
    contributions.push_back(mu.weight(x) * acc);
  }
  return pairwise_sum(contributions);
}

double wolff_integral(const Measure& mu, const Cube& q, double s, double r_min, double r_max) {
  return wolff_integral(mu, q.box(), s, r_min, r_max);
}

double wolff_dyadic(const Measure& mu, const LatticeView& view, double s) {
  std::vector<double> terms;
  terms.reserve(view.cubes.size());
  for (const Cube& q : view.cubes) {
    const double m = mass_cube(mu, q);
    const double dens = m / std::pow(q.side(), s);
    terms.push_back(dens * dens * m);
  }
  return pairwise_sum(terms);
}

double growth_constant(const Measure& mu, const LatticeView& view, double s, Cube* arg_max) {
  double best = 0.0;
  for (const Cube& q : view.cubes) {
    const double dens = density(mu, q, s);
    if (dens > best) {
      best = dens;
      if (arg_max) *arg_max = q;
    }
  }
  return best;
}

double weak_density(const Measure& mu, const LatticeView& view, double s, double eps,
                    const Eigen::Ref<const Vec>& x) {
  if (!(eps > 0.0)) fail_parameter("weak_density: eps must be positive");
  double best = 0.0;
  for (int m = view.m_max; m >= view.m_min; --m) {
    const double discount = std::exp2(-eps * std::abs(static_cast<double>(m)));
    for (const Cube& q : cubes_containing(x, m)) {
      const double v = density(mu, q, s) * discount;
      if (v > best) best = v;
    }
  }
  return best;
}

double exceedance_mass(const Measure& mu, const LatticeView& view, double s, double eps, double T) {
  const Box doubled_root = root_cube(mu.dim()).dilated(2.0);
  double acc = 0.0;
  for (Index i : mu.atoms_in_box(doubled_root)) {
    if (weak_density(mu, view, s, eps, mu.point(i)) > T) acc += mu.weight(i);
  }
  return acc;
}

double plane_mass_test(const Measure& mu, const Plane& plane, double tol) {
  if (plane.basis.rows() != mu.dim() || plane.point.size() != mu.dim())
    fail_parameter("plane_mass_test: dimension mismatch");
  const Index k = plane.basis.cols();
  if (k < 0 || k > mu.dim()) fail_parameter("plane_mass_test: bad plane dimension");
  Mat gram = plane.basis.transpose() * plane.basis;
  if ((gram - Mat::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10)
    fail_domain("plane_mass_test: basis is not orthonormal");

  const Box root = root_cube(mu.dim()).box();
  double acc = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    const Vec x = mu.point(i);
    const bool in_closed_root =
        (x.array() >= root.lo.array()).all() && (x.array() <= root.hi.array()).all();
    if (!in_closed_root) continue;
    const Vec r = x - plane.point;
    const double dist = (r - plane.basis * (plane.basis.transpose() * r)).norm();
    if (dist <= tol) acc += mu.weight(i);
  }
  return acc;
}

WolffReport wolff_report(const Measure& mu, const LatticeView& view, const Box& region, double s,
                         double r_min, double r_max) {
  WolffReport rep;
  rep.measure_id = mu.id();
  rep.s = s;
  rep.n = mu.size();
  rep.r_min = r_min;
  rep.r_max = r_max;
  rep.wolff_integral = wolff_integral(mu, region, s, r_min, r_max);
  rep.wolff_dyadic = wolff_dyadic(mu, view, s);
  rep.growth_constant = growth_constant(mu, view, s);
  return rep;
}

}  // namespace wolff
