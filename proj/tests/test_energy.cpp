// Wolff energies, growth constants, weak densities, and plane mass.
//
// Oracles: closed forms for one- and two-atom configurations (the radial
// integrand is piecewise constant, so pieces integrate exactly) and a
// log-scale trapezoid quadrature with brute-force ball masses.

#include "wolff/energy.hpp"
#include "wolff/lattice.hpp"
#include "wolff/measure.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace wolff;

namespace {

Measure cantor(int d, double lambda, int n) {
  MeasureSpec spec;
  spec.family = "cantor";
  spec.d = d;
  spec.lambda = lambda;
  spec.generations = n;
  return generate(spec);
}

Measure lebesgue_line(int resolution) {
  MeasureSpec spec;
  spec.family = "lebesgue-cube";
  spec.d = 1;
  spec.side = 1.0;
  spec.resolution = resolution;
  return generate(spec);
}

Measure atoms1d(std::vector<double> xs, std::vector<double> ws) {
  Mat pts(1, static_cast<Index>(xs.size()));
  Vec w(static_cast<Index>(ws.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    pts(0, static_cast<Index>(i)) = xs[i];
    w[static_cast<Index>(i)] = ws[i];
  }
  return Measure(pts, w);
}

// Exact integral of r^(-2s-1) over [a, b] scaled by m^2.
double piece(double m, double a, double b, double s) {
  const double upper = std::isinf(b) ? 0.0 : std::pow(b, -2.0 * s);
  return m * m * (std::pow(a, -2.0 * s) - upper) / (2.0 * s);
}

Box interval(double lo, double hi) {
  Vec l(1), h(1);
  l[0] = lo;
  h[0] = hi;
  return Box(l, h);
}

}  // namespace

TEST_CASE("wolff_integral closed forms") {
  const double inf = std::numeric_limits<double>::infinity();

  SUBCASE("single atom") {
    for (double s : {0.5, 1.5, 2.5}) {
      for (double w : {1.0, 2.0}) {
        const Measure mu = atoms1d({0.3}, {w});
        const double got = wolff_integral(mu, interval(0.0, 1.0), s, 0.25, inf);
        const double want = w * w * w * std::pow(0.25, -2.0 * s) / (2.0 * s);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));

        const double finite = wolff_integral(mu, interval(0.0, 1.0), s, 0.25, 2.0);
        CHECK(finite == doctest::Approx(w * piece(w, 0.25, 2.0, s)).epsilon(1e-12));
      }
    }
  }

  SUBCASE("two atoms: one interior mass step") {
    const double w1 = 0.7, w2 = 0.4, t = 0.35, s = 0.8;
    const Measure mu = atoms1d({0.0, t}, {w1, w2});
    const double got = wolff_integral(mu, interval(-1.0, 1.0), s, 0.1, 2.0);
    const double want = w1 * (piece(w1, 0.1, t, s) + piece(w1 + w2, t, 2.0, s)) +
                        w2 * (piece(w2, 0.1, t, s) + piece(w1 + w2, t, 2.0, s));
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("region truncation drops outside atoms from both roles") {
    const double w1 = 0.7, w2 = 0.4, s = 0.8;
    const Measure mu = atoms1d({0.0, 0.35}, {w1, w2});
    const double got = wolff_integral(mu, interval(-0.1, 0.2), s, 0.1, 2.0);
    CHECK(got == doctest::Approx(w1 * piece(w1, 0.1, 2.0, s)).epsilon(1e-12));
  }

  SUBCASE("empty region integrates to zero") {
    const Measure mu = atoms1d({0.0}, {1.0});
    CHECK(wolff_integral(mu, interval(5.0, 6.0), 0.5, 0.1, 1.0) == 0.0);
  }

  SUBCASE("bad radii are errors") {
    const Measure mu = atoms1d({0.0}, {1.0});
    CHECK_THROWS_AS(wolff_integral(mu, interval(-1.0, 1.0), 0.5, 1.0, 0.5), Error);
    CHECK_THROWS_AS(wolff_integral(mu, interval(-1.0, 1.0), 0.5, 0.0, 1.0), Error);
  }

  SUBCASE("cube overload matches the box overload on the same region") {
    const Measure mu = cantor(1, 0.25, 3);
    const Cube q = root_cube(1);
    CHECK(wolff_integral(mu, q, 0.5, 0.01, 4.0) ==
          wolff_integral(mu, q.box(), 0.5, 0.01, 4.0));
  }
}

TEST_CASE("wolff_integral matches a log-trapezoid quadrature oracle") {
  const Measure mu = lebesgue_line(64);
  const double s = 0.5, a = std::ldexp(1.0, -6), b = 2.0;
  const Box region = interval(0.0, 1.0);

  const double got = wolff_integral(mu, region, s, a, b);

  // Oracle: for each atom in the region, integrate (mass/r^s)^2 dr/r on a
  // 10^4-node log grid with brute-force restricted ball masses.
  const int N = 10000;
  const double ua = std::log(a), ub = std::log(b);
  double total = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    const Vec x = mu.point(i);
    if (!region.contains(x)) continue;
    auto integrand = [&](double r) {
      double m = 0.0;
      for (Index j = 0; j < mu.size(); ++j) {
        if (region.contains(mu.point(j)) && (mu.point(j) - x).norm() < r) m += mu.weight(j);
      }
      const double density = m / std::pow(r, s);
      return density * density;  // d(log r) measure absorbs the 1/r
    };
    double acc = 0.0;
    double prev = integrand(a);
    for (int k = 1; k <= N; ++k) {
      const double u = ua + (ub - ua) * static_cast<double>(k) / N;
      const double cur = integrand(std::exp(u));
      acc += 0.5 * (prev + cur) * (ub - ua) / N;
      prev = cur;
    }
    total += mu.weight(i) * acc;
  }

  CHECK(got == doctest::Approx(total).epsilon(0.01));
}

TEST_CASE("dyadic wolff energy") {
  SUBCASE("no cubes means zero energy") {
    const Measure mu = atoms1d({0.5}, {1.0});
    LatticeView empty;
    CHECK(wolff_dyadic(mu, empty, 0.5) == 0.0);
  }

  SUBCASE("single generic atom, single level") {
    const double w = 0.6, s = 0.7;
    const int m = -2;
    const Measure mu = atoms1d({0.31}, {w});
    const LatticeView view = enumerate_cubes(mu, m, m);
    REQUIRE(view.cubes.size() == 3);  // generic point: 3 triples in d=1
    const double dens = w / std::pow(3.0 * std::ldexp(1.0, m), s);
    CHECK(wolff_dyadic(mu, view, s) == doctest::Approx(3.0 * dens * dens * w).epsilon(1e-12));
  }

  SUBCASE("critical-dimension growth is affine in the level span") {
    // lambda = 1/4 has dimension 1/2, so at s = 1/2 each extra pair of
    // levels adds roughly the same energy.
    std::vector<double> w;
    for (int n : {3, 4, 5}) {
      const Measure mu = cantor(1, 0.25, n);
      w.push_back(wolff_dyadic(mu, enumerate_cubes(mu, -2 * n, 0), 0.5));
    }
    const double d1 = w[1] - w[0], d2 = w[2] - w[1];
    CHECK(d1 > 0.0);
    CHECK(d2 > 0.0);
    CHECK(d2 > 0.5 * d1);
    CHECK(d2 < 2.0 * d1);
  }
}

TEST_CASE("growth constant") {
  SUBCASE("a unit-mass measure in the root cube has density at least 3^-s there") {
    const double s = 0.5;
    const Measure mu = cantor(1, 0.25, 4);
    const LatticeView view = enumerate_cubes(mu, -8, 0);
    CHECK(growth_constant(mu, view, s) >= std::pow(3.0, -s));
  }

  SUBCASE("single atom: maximum sits at the finest level with exact value") {
    const double w = 0.8, s = 0.6;
    const Measure mu = atoms1d({0.31}, {w});
    const LatticeView view = enumerate_cubes(mu, -3, 2);
    Cube arg;
    const double got = growth_constant(mu, view, s, &arg);
    CHECK(got == w / std::pow(3.0 * std::ldexp(1.0, -3), s));
    CHECK(arg.level == -3);
    CHECK(arg.box().contains(mu.point(0)));
  }

  SUBCASE("self-similar plateau across generations") {
    std::vector<double> gc;
    for (int n : {4, 6, 8}) {
      const Measure mu = cantor(1, 0.25, n);
      gc.push_back(growth_constant(mu, enumerate_cubes(mu, -2 * n, 0), 0.5));
    }
    CHECK(gc[1] == doctest::Approx(gc[0]).epsilon(0.05));
    CHECK(gc[2] == doctest::Approx(gc[1]).epsilon(0.05));
  }
}

TEST_CASE("weak density") {
  const double s = 0.6, eps = 0.1;

  SUBCASE("single atom: exact maximum over levels of discounted density") {
    const double w = 0.9;
    const Measure mu = atoms1d({0.31}, {w});
    const LatticeView view = enumerate_cubes(mu, -4, 3);
    Vec x(1);
    x[0] = 0.31;
    double want = 0.0;
    for (int m = -4; m <= 3; ++m) {
      const double dens = w / std::pow(3.0 * std::ldexp(1.0, m), s);
      want = std::max(want, dens * std::pow(2.0, -eps * std::abs(static_cast<double>(m))));
    }
    CHECK(weak_density(mu, view, s, eps, x) == doctest::Approx(want).epsilon(1e-12));
  }

  SUBCASE("unit mass in the root cube gives at least the undiscounted root density") {
    const Measure mu = cantor(1, 0.25, 3);
    const LatticeView view = enumerate_cubes(mu, -6, 0);
    Vec x(1);
    x[0] = 0.0;
    CHECK(weak_density(mu, view, s, eps, x) >= std::pow(3.0, -s));
  }

  SUBCASE("homogeneous of degree one in the weights") {
    const Measure mu = cantor(1, 0.25, 3);
    Vec w3 = mu.weights() * 3.0;
    const Measure nu(mu.points(), w3);
    const LatticeView view = enumerate_cubes(mu, -6, 0);
    Vec x(1);
    x[0] = 0.75;
    CHECK(weak_density(nu, view, s, eps, x) ==
          doctest::Approx(3.0 * weak_density(mu, view, s, eps, x)).epsilon(1e-12));
  }
}

TEST_CASE("exceedance mass is a decreasing tail of the total mass") {
  const Measure mu = cantor(1, 0.25, 4);
  const LatticeView view = enumerate_cubes(mu, -8, 0);
  const double s = 0.5, eps = 0.1;

  const double at0 = exceedance_mass(mu, view, s, eps, 0.0);
  CHECK(at0 == doctest::Approx(mu.total_mass()).epsilon(1e-12));

  double prev = at0;
  for (double T : {0.2, 0.4, 0.8, 1.6, 3.2}) {
    const double cur = exceedance_mass(mu, view, s, eps, T);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
  CHECK(exceedance_mass(mu, view, s, eps, 1e9) == 0.0);
}

TEST_CASE("plane mass within the closed root cube") {
  SUBCASE("mass on the plane, then far away") {
    Mat pts(2, 3);
    pts << 0.0, 0.5, 1.0, 0.0, 0.0, 0.0;
    Vec w(3);
    w << 0.2, 0.3, 0.5;
    const Measure mu(pts, w);
    Plane line;
    line.point = Vec::Zero(2);
    line.basis = Mat::Zero(2, 1);
    line.basis(0, 0) = 1.0;
    CHECK(plane_mass_test(mu, line, 1e-12) == 1.0);

    Plane far = line;
    far.point[1] = 5.0;
    CHECK(plane_mass_test(mu, far, 1e-3) == 0.0);
  }

  SUBCASE("planar slice of a 2-d corner construction") {
    const int n = 5;
    const Measure mu = cantor(2, 0.25, n);
    Plane line;
    line.point = Vec::Zero(2);
    line.basis = Mat::Zero(2, 1);
    line.basis(0, 0) = 1.0;
    // Atoms on the x-axis pick the zero offset in y at every generation:
    // 2^n of the 4^n atoms.
    CHECK(plane_mass_test(mu, line, 1e-9) == std::pow(2.0, -n));
  }

  SUBCASE("atoms outside the closed root cube do not count") {
    Mat pts(2, 2);
    pts << 0.5, 3.0, 0.0, 0.0;
    Vec w(2);
    w << 1.0, 1.0;
    const Measure mu(pts, w);
    Plane line;
    line.point = Vec::Zero(2);
    line.basis = Mat::Zero(2, 1);
    line.basis(0, 0) = 1.0;
    CHECK(plane_mass_test(mu, line, 1e-9) == 1.0);
  }

  SUBCASE("non-orthonormal basis is a domain error") {
    const Measure mu = cantor(2, 0.25, 2);
    Plane bad;
    bad.point = Vec::Zero(2);
    bad.basis = Mat::Zero(2, 1);
    bad.basis(0, 0) = 2.0;
    CHECK_THROWS_AS(plane_mass_test(mu, bad, 1e-9), Error);

    Plane dependent;
    dependent.point = Vec::Zero(2);
    dependent.basis = Mat::Ones(2, 2) * std::sqrt(0.5);
    CHECK_THROWS_AS(plane_mass_test(mu, dependent, 1e-9), Error);
  }
}

TEST_CASE("wolff_report aggregates the pieces") {
  const Measure mu = cantor(1, 0.25, 3);
  const LatticeView view = enumerate_cubes(mu, -6, 0);
  const Box region = interval(-0.5, 1.5);
  const WolffReport rep = wolff_report(mu, view, region, 0.5, 0.01, 4.0);
  CHECK(rep.s == 0.5);
  CHECK(rep.n == mu.size());
  CHECK(rep.r_min == 0.01);
  CHECK(rep.r_max == 4.0);
  CHECK(rep.wolff_integral == wolff_integral(mu, region, 0.5, 0.01, 4.0));
  CHECK(rep.wolff_dyadic == wolff_dyadic(mu, view, 0.5));
  CHECK(rep.growth_constant == growth_constant(mu, view, 0.5));
  CHECK(rep.wolff_integral > 0.0);
}
