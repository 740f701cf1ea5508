// Tests for reflectionless defects, antisymmetric ball differences,
// arithmetic-progression closures, and lattice-structure verification.

#include "wolff/measure.hpp"
#include "wolff/reflectionless.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

using namespace wolff;

namespace {

Vec vec1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

Vec vec2(double x, double y) {
  Vec v(2);
  v[0] = x;
  v[1] = y;
  return v;
}

Measure line_measure(const std::vector<double>& xs, const std::vector<double>& ws,
                     const std::string& id = "line") {
  Mat pts(1, static_cast<Index>(xs.size()));
  Vec w(static_cast<Index>(ws.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    pts(0, static_cast<Index>(i)) = xs[i];
    w[static_cast<Index>(i)] = ws[i];
  }
  return Measure(pts, w, id);
}

Box box1(double lo, double hi) { return Box(vec1(lo), vec1(hi)); }

MeasureSpec stack_spec(std::vector<double> pattern, int count = 3, int resolution = 16) {
  MeasureSpec spec;
  spec.id = "stack";
  spec.family = "plane-lattice";
  spec.d = 2;
  spec.plane_dim = 1;
  spec.spacing = 0.5;
  spec.count = count;
  spec.extent = 1.0;
  spec.plane_resolution = resolution;
  spec.pattern = std::move(pattern);
  return spec;
}

bool has_check(const StructureReport& rep, const std::string& name) {
  return std::any_of(rep.violations.begin(), rep.violations.end(),
                     [&](const Violation& v) { return v.check == name; });
}

}  // namespace

TEST_CASE("defect vanishes exactly on an interior window of the integer lattice") {
  // Unit weights on {-10..10}; an odd bump of radius 2.5 sees offsets +-1, +-2
  // at every atom whose neighborhood is complete, and those contributions
  // cancel in exactly mirrored order, so every window value is bit-identical.
  std::vector<double> xs, ws;
  for (int i = -10; i <= 10; ++i) {
    xs.push_back(static_cast<double>(i));
    ws.push_back(1.0);
  }
  const Measure mu = line_measure(xs, ws);
  const SmoothBump bump(2.5, 0.5);

  const DefectReport rep = reflectionless_defect(mu, bump, box1(-7.5, 7.5));
  CHECK(rep.count == 15);
  CHECK(rep.defect == 0.0);
  CHECK(std::abs(rep.reference) <= 1e-15);
}

TEST_CASE("defect at a truncated lattice edge equals the missing bump value") {
  // Widening the window to {-9..9} admits the two atoms whose radius-2.5
  // neighborhood loses exactly the offset-2 partner beyond the last atom:
  // T(9) = phi(2) and T(-9) = -phi(2), every other value is 0, and the
  // odd-count median stays 0.
  std::vector<double> xs, ws;
  for (int i = -10; i <= 10; ++i) {
    xs.push_back(static_cast<double>(i));
    ws.push_back(1.0);
  }
  const Measure mu = line_measure(xs, ws);
  const SmoothBump bump(2.5, 0.5);

  const DefectReport rep = reflectionless_defect(mu, bump, box1(-9.5, 9.5));
  CHECK(rep.count == 19);
  CHECK(std::abs(rep.reference) <= 1e-15);
  CHECK(rep.defect == doctest::Approx(bump(vec1(2.0))).epsilon(1e-12));
}

TEST_CASE("defect of a jittered uniform grid decreases under refinement") {
  // Atom positions t + (0.2/n) sin(7t) at the cell midpoints t, weight 1/n:
  // the continuum limit is Lebesgue measure (constant transform), while the
  // jitter perturbs the discrete density at amplitude O(1/n), so the defect
  // should shrink roughly linearly in the cell width.
  const SmoothBump bump(0.25, 0.5);
  auto defect_at = [&](int n) {
    std::vector<double> xs, ws;
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) / n;
      xs.push_back(t + 0.2 / n * std::sin(7.0 * t));
      ws.push_back(1.0 / n);
    }
    const Measure mu = line_measure(xs, ws, "jitter");
    return reflectionless_defect(mu, bump, box1(0.26, 0.74)).defect;
  };

  const double d16 = defect_at(16);
  const double d64 = defect_at(64);
  const double d256 = defect_at(256);
  CHECK(d16 > d64);
  CHECK(d64 > d256);
  CHECK(d64 <= 0.5 * d16);
  CHECK(d256 <= 0.5 * d64);
}

TEST_CASE("defect of a self-similar corner measure stays bounded away from zero") {
  // The generation-5 corner construction has no local reflection symmetry at
  // the bump scale, so the transform genuinely varies across the window.
  MeasureSpec spec;
  spec.id = "corner";
  spec.family = "cantor";
  spec.d = 1;
  spec.lambda = 0.25;
  spec.generations = 5;
  const Measure mu = generate(spec);
  const SmoothBump bump(0.1, 0.5);
  const Box window = mu.support_box().dilated(1.0 + 1e-12).shrunk(0.1);

  const DefectReport rep = reflectionless_defect(mu, bump, window);
  CHECK(rep.count > 0);
  // Deterministic computation; measured 2.6e-3, twelve orders above the
  // floating-point noise of the exactly reflectionless lattice cases.
  CHECK(rep.defect >= 2e-3);
}

TEST_CASE("defect scales linearly with the weights") {
  MeasureSpec spec;
  spec.id = "corner";
  spec.family = "cantor";
  spec.d = 1;
  spec.lambda = 0.3;
  spec.generations = 4;
  const Measure mu = generate(spec);
  Measure mu3(mu.points(), 3.0 * mu.weights(), "scaled");
  const SmoothBump bump(0.12, 0.5);
  const Box window = mu.support_box().dilated(1.0 + 1e-12).shrunk(0.12);

  const DefectReport a = reflectionless_defect(mu, bump, window);
  const DefectReport b = reflectionless_defect(mu3, bump, window);
  CHECK(a.count == b.count);
  CHECK(b.reference == doctest::Approx(3.0 * a.reference).epsilon(1e-12));
  CHECK(b.defect == doctest::Approx(3.0 * a.defect).epsilon(1e-12));
}

TEST_CASE("defect requires at least one atom in the window") {
  const Measure mu = line_measure({0.0, 1.0}, {1.0, 1.0});
  const SmoothBump bump(0.5, 0.5);
  CHECK_THROWS_WITH_AS(reflectionless_defect(mu, bump, box1(3.0, 4.0)),
                       doctest::Contains("no atoms in the window"), Error);
}

TEST_CASE("ball difference detects one-sided mass and cancels mirrored mass") {
  const Measure single = line_measure({0.3}, {0.7});

  SUBCASE("single atom caught by exactly one of the two balls") {
    CHECK(ball_difference(single, vec1(0.1), vec1(0.2), 0.05) == 0.7);
    CHECK(ball_difference(single, vec1(0.5), vec1(0.2), 0.05) == -0.7);
    CHECK(ball_difference(single, vec1(5.0), vec1(0.2), 0.05) == 0.0);
  }

  SUBCASE("mirror-symmetric pair cancels exactly for every shift") {
    const Measure pair = line_measure({-0.4, 0.4}, {0.6, 0.6});
    for (double z : {0.1, 0.25, 0.4, 1.0}) {
      CHECK(ball_difference(pair, vec1(0.0), vec1(z), 0.3) == 0.0);
    }
  }

  SUBCASE("radius must be positive") {
    CHECK_THROWS_AS(ball_difference(single, vec1(0.0), vec1(0.1), 0.0), Error);
    CHECK_THROWS_AS(ball_difference(single, vec1(0.0), vec1(0.1), -1.0), Error);
  }
}

TEST_CASE("ball difference vanishes at interior points of a uniform plane stack") {
  // Equal-weight stacked lines: shifting the two balls by one lattice spacing
  // (or one in-plane cell) swaps congruent atom patterns with identical
  // weights, so the two masses agree exactly.
  MeasureSpec spec = stack_spec({1.0}, 2, 16);
  const Measure mu = generate(spec);
  const double h = 2.0 * spec.extent / spec.plane_resolution;

  const Vec center = vec2(h / 2.0, 0.0);  // atom of the middle line
  CHECK(mu.mass_ball(center, 1e-9) > 0.0);
  CHECK(ball_difference(mu, center, vec2(0.0, spec.spacing), 0.2) == 0.0);
  CHECK(ball_difference(mu, center, vec2(h, 0.0), 0.2) == 0.0);
  CHECK(ball_difference(mu, center, vec2(h, spec.spacing), 0.2) == 0.0);
}

TEST_CASE("closure of two dyadic points fills the arithmetic progression") {
  const std::vector<Vec> support = {vec1(0.0), vec1(0.25)};
  const Box window = box1(-0.75, 0.75);
  const ClosureResult res = reflection_closure(support, {}, window);

  REQUIRE(res.points.size() == 7);
  std::vector<double> got;
  for (const Vec& p : res.points) got.push_back(p[0]);
  std::sort(got.begin(), got.end());
  for (int k = -3; k <= 3; ++k) CHECK(got[static_cast<size_t>(k + 3)] == k * 0.25);

  CHECK(res.min_spacing == 0.25);
  CHECK(res.uniformly_discrete);
  CHECK_FALSE(res.truncated);
  CHECK(res.sweeps == 2);  // one productive sweep plus the fixed-point check
}

TEST_CASE("closure leaves an already closed lattice alone in one sweep") {
  std::vector<Vec> lattice;
  for (int k = -3; k <= 3; ++k) lattice.push_back(vec1(k * 0.25));
  const ClosureResult res = reflection_closure(lattice, {}, box1(-0.75, 0.75));

  CHECK(res.sweeps == 1);
  REQUIRE(res.points.size() == lattice.size());
  for (size_t i = 0; i < lattice.size(); ++i) CHECK(res.points[i][0] == lattice[i][0]);

  SUBCASE("closing the closure is idempotent") {
    const ClosureResult again = reflection_closure(res.points, {}, box1(-0.75, 0.75));
    CHECK(again.sweeps == 1);
    CHECK(again.points.size() == res.points.size());
  }
}

TEST_CASE("closure of incommensurable steps loses uniform discreteness") {
  const std::vector<Vec> support = {vec1(0.0), vec1(1.0), vec1(std::sqrt(2.0))};
  ClosureOptions opts;
  opts.max_points = 2000;
  opts.spacing_floor = 1e-3;
  const ClosureResult res = reflection_closure(support, {}, box1(0.0, 4.0), opts);

  CHECK(res.points.size() >= 50);
  CHECK((res.truncated || !res.uniformly_discrete));
}

TEST_CASE("a larger window only adds closure points") {
  const std::vector<Vec> support = {vec1(0.0), vec1(0.25)};
  const ClosureResult small = reflection_closure(support, {}, box1(-0.75, 0.75));
  const ClosureResult big = reflection_closure(support, {}, box1(-1.5, 1.5));

  CHECK(big.points.size() >= small.points.size());
  for (const Vec& p : small.points) {
    const bool found = std::any_of(big.points.begin(), big.points.end(), [&](const Vec& q) {
      return std::abs(q[0] - p[0]) <= 1e-9;
    });
    CHECK(found);
  }
}

TEST_CASE("fixed generating pairs run a single pass and keep bystanders") {
  // Only the pair (0, 0.3) generates; the atom at 1.7 is carried along
  // untouched, and no progression through it appears.
  const std::vector<Vec> support = {vec1(0.0), vec1(0.3), vec1(1.7)};
  const std::vector<std::pair<Index, Index>> pairs = {{0, 1}};
  const ClosureResult res = reflection_closure(support, pairs, box1(-1.0, 2.0));

  CHECK(res.sweeps == 1);
  CHECK_FALSE(res.truncated);
  REQUIRE(res.points.size() == 11);  // k*0.3 for k in [-3, 6], plus 1.7

  auto has_near = [&](double x, double tol) {
    return std::any_of(res.points.begin(), res.points.end(),
                       [&](const Vec& p) { return std::abs(p[0] - x) <= tol; });
  };
  for (int k = -3; k <= 6; ++k) CHECK(has_near(k * 0.3, 1e-12));
  CHECK(has_near(1.7, 0.0));
  CHECK_FALSE(has_near(1.4, 0.05));  // would need the (0.3, 1.7) progression
  CHECK(res.min_spacing == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("closure merges points that quantize to the same cell") {
  ClosureOptions opts;
  opts.merge_tol = 1e-9;  // quantum 3e-9 for a window of side 3
  const ClosureResult res =
      reflection_closure({vec1(0.0), vec1(5e-10)}, {}, box1(-1.0, 2.0), opts);
  CHECK(res.points.size() == 1);
  CHECK(res.min_spacing == 0.0);
  CHECK(res.uniformly_discrete);  // fewer than two points
}

TEST_CASE("closure rejects bad inputs") {
  const std::vector<Vec> support = {vec1(0.0), vec1(1.0)};
  CHECK_THROWS_AS(reflection_closure({}, {}, box1(0.0, 1.0)), Error);
  CHECK_THROWS_AS(reflection_closure(support, {}, box1(1.0, 0.0)), Error);
  ClosureOptions bad;
  bad.merge_tol = 0.0;
  CHECK_THROWS_AS(reflection_closure(support, {}, box1(0.0, 1.0), bad), Error);
  CHECK_THROWS_AS(reflection_closure(support, {{0, 2}}, box1(0.0, 1.0)), Error);
  CHECK_THROWS_AS(reflection_closure(support, {{-1, 0}}, box1(0.0, 1.0)), Error);
}

TEST_CASE("a period-2 weight pattern verifies as a symmetric plane lattice") {
  // Reflecting lattice index e about c lands on 2c - e, which has the parity
  // of e, so alternating weights are reflection-symmetric.
  const MeasureSpec spec = stack_spec({1.0, 2.0});
  const Measure mu = generate(spec);
  const StructureHypothesis hyp = plane_lattice_hypothesis(spec);

  const StructureReport rep = verify_structure(mu, hyp, 1e-6);
  CHECK(rep.pass);
  CHECK(rep.violation_count == 0);
  CHECK(rep.violations.empty());
  CHECK(rep.max_plane_distance <= 1e-12);
  CHECK(rep.mass_spread <= 1e-12);
  CHECK(rep.min_base_spacing == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a period-3 weight pattern fails only the weight symmetry") {
  // 2c - e = e mod 3 requires c = e mod 3, so most reflections hit a base
  // point carrying a different pattern weight.
  const MeasureSpec spec = stack_spec({1.0, 2.0, 3.0});
  const Measure mu = generate(spec);
  const StructureHypothesis hyp = plane_lattice_hypothesis(spec);

  const StructureReport rep = verify_structure(mu, hyp, 1e-6);
  CHECK_FALSE(rep.pass);
  CHECK(rep.violation_count > 0);
  REQUIRE(!rep.violations.empty());
  for (const Violation& v : rep.violations) CHECK(v.check == "symmetry-weight");
}

TEST_CASE("atoms off the hypothesized plane are reported individually") {
  MeasureSpec spec;
  spec.id = "corner2";
  spec.family = "cantor";
  spec.d = 2;
  spec.lambda = 0.25;
  spec.generations = 3;
  const Measure mu = generate(spec);  // 64 atoms, 8 of them on the x-axis

  StructureHypothesis hyp;
  hyp.basis = Mat::Zero(2, 1);
  hyp.basis(0, 0) = 1.0;
  hyp.points = Mat::Zero(2, 1);
  hyp.weights = Vec::Ones(1);
  hyp.window = Box(vec2(-1.0, -1.0), vec2(1.0, 1.0));

  SUBCASE("every off-axis atom is a plane-distance violation") {
    const StructureReport rep = verify_structure(mu, hyp, 1e-6);
    CHECK_FALSE(rep.pass);
    CHECK(has_check(rep, "plane-distance"));
    Index off_axis = 0;
    for (const Violation& v : rep.violations) off_axis += v.check == "plane-distance";
    CHECK(off_axis == 56);
    CHECK(rep.max_plane_distance == doctest::Approx(0.984375).epsilon(1e-12));
  }

  SUBCASE("max_listed caps the rows but not the count") {
    VerifyOptions opts;
    opts.max_listed = 5;
    const StructureReport rep = verify_structure(mu, hyp, 1e-6, opts);
    CHECK(rep.violations.size() == 5);
    CHECK(rep.violation_count >= 56);
  }
}

TEST_CASE("perturbing one hypothesis weight breaks the reflection symmetry") {
  const MeasureSpec spec = stack_spec({1.0, 2.0});
  const Measure mu = generate(spec);
  StructureHypothesis hyp = plane_lattice_hypothesis(spec);
  hyp.weights[0] += 0.5;

  const StructureReport rep = verify_structure(mu, hyp, 1e-6);
  CHECK_FALSE(rep.pass);
  CHECK(has_check(rep, "symmetry-weight"));
  CHECK_FALSE(has_check(rep, "symmetry-set"));
  CHECK_FALSE(has_check(rep, "plane-distance"));
}

TEST_CASE("hypothesis defects are reported by category") {
  const Measure mu = line_measure({0.0, 0.5, 1.0}, {1.0, 1.0, 1.0});

  SUBCASE("base points along the plane direction violate orthogonality") {
    MeasureSpec spec = stack_spec({1.0});
    const Measure stack = generate(spec);
    StructureHypothesis hyp = plane_lattice_hypothesis(spec);
    hyp.points(0, 0) = 0.4;  // slide one base point inside its own plane
    const StructureReport rep = verify_structure(stack, hyp, 1e-6);
    CHECK(has_check(rep, "orthogonality"));
    REQUIRE(!rep.violations.empty());
    bool located = false;
    for (const Violation& v : rep.violations) {
      if (v.check == "orthogonality") located = v.location.find("base point") != std::string::npos;
    }
    CHECK(located);
  }

  SUBCASE("base points closer than the tolerance violate discreteness") {
    MeasureSpec spec = stack_spec({1.0});
    const Measure stack = generate(spec);
    StructureHypothesis hyp = plane_lattice_hypothesis(spec);
    hyp.points(1, 1) = hyp.points(1, 0) + 1e-9;
    const StructureReport rep = verify_structure(stack, hyp, 1e-6);
    CHECK(has_check(rep, "discreteness"));
    CHECK(rep.min_base_spacing <= 1e-6);
  }

  SUBCASE("non-orthonormal bases are rejected outright") {
    StructureHypothesis hyp;
    hyp.basis = Mat::Zero(1, 1);
    hyp.basis(0, 0) = 2.0;
    hyp.points = Mat::Zero(1, 1);
    hyp.weights = Vec::Ones(1);
    hyp.window = box1(-1.0, 2.0);
    CHECK_THROWS_WITH_AS(verify_structure(mu, hyp, 1e-6),
                         doctest::Contains("not orthonormal"), Error);
  }

  SUBCASE("plane dimension cannot exceed the ambient dimension") {
    StructureHypothesis hyp;
    hyp.basis = Mat::Ones(1, 2);
    hyp.points = Mat::Zero(1, 1);
    hyp.weights = Vec::Ones(1);
    hyp.window = box1(-1.0, 2.0);
    CHECK_THROWS_WITH_AS(verify_structure(mu, hyp, 1e-6),
                         doctest::Contains("plane dimension"), Error);
  }

  SUBCASE("tolerance and dimensions are validated") {
    MeasureSpec spec = stack_spec({1.0});
    const StructureHypothesis hyp = plane_lattice_hypothesis(spec);
    CHECK_THROWS_AS(verify_structure(generate(spec), hyp, 0.0), Error);
    CHECK_THROWS_AS(verify_structure(mu, hyp, 1e-6), Error);  // 1-d measure, 2-d hypothesis
  }
}

TEST_CASE("no integer plane dimension fits strictly between floor(s) and floor(s)+1") {
  MeasureSpec spec = stack_spec({1.0});
  const StructureHypothesis hyp = plane_lattice_hypothesis(spec);  // k = 1, d = 2
  for (double s : {0.3, 0.999, 1.0, 1.3, 1.7}) {
    CHECK_FALSE(dimension_window_check(hyp, Ambient(2, s, 0.05)));
  }

  MeasureSpec spec3 = stack_spec({1.0});
  spec3.d = 3;
  spec3.plane_dim = 2;
  const StructureHypothesis hyp3 = plane_lattice_hypothesis(spec3);  // k = 2, d = 3
  for (double s : {0.5, 1.5, 2.5}) {
    CHECK_FALSE(dimension_window_check(hyp3, Ambient(3, s, 0.05)));
  }
}

TEST_CASE("structure hypotheses round-trip through JSON exactly") {
  const MeasureSpec spec = stack_spec({1.0, 2.0});
  const StructureHypothesis hyp = plane_lattice_hypothesis(spec);
  const StructureHypothesis back = StructureHypothesis::from_json_text(hyp.to_json_text());

  CHECK(back.dim() == hyp.dim());
  CHECK(back.plane_dim() == hyp.plane_dim());
  CHECK(back.basis == hyp.basis);
  CHECK(back.points == hyp.points);
  CHECK(back.weights == hyp.weights);
  CHECK(back.window.lo == hyp.window.lo);
  CHECK(back.window.hi == hyp.window.hi);
}

TEST_CASE("hypothesis JSON is validated field by field") {
  auto reject = [](const std::string& text) {
    CHECK_THROWS_AS(StructureHypothesis::from_json_text(text), Error);
  };
  reject("not json");
  reject("[]");
  reject(R"({"d":1,"basis":[[1]],"points":[[0]],"weights":[1],)"
         R"("window":{"lo":[0],"hi":[1]},"extra":0})");
  reject(R"({"d":2,"basis":[[1]],"points":[[0,0]],"weights":[1],)"
         R"("window":{"lo":[0,0],"hi":[1,1]}})");  // basis column of length 1
  reject(R"({"d":1,"basis":[[1]],"points":[],"weights":[],)"
         R"("window":{"lo":[0],"hi":[1]}})");  // empty base set
  reject(R"({"d":1,"basis":[[1]],"points":[[0]],"weights":[1,2],)"
         R"("window":{"lo":[0],"hi":[1]}})");  // weight count mismatch
  reject(R"({"d":1,"basis":[[1]],"points":[[0]],"weights":[-1],)"
         R"("window":{"lo":[0],"hi":[1]}})");  // negative weight
  reject(R"({"d":1,"basis":[[1]],"points":[[0]],"weights":[1],)"
         R"("window":{"lo":[1],"hi":[0]}})");  // empty window
  reject(R"({"d":1,"basis":[[1]],"points":[[0]],"weights":[1],)"
         R"("window":{"lo":[0]}})");  // missing hi
}

TEST_CASE("the generated hypothesis matches the plane-lattice generator") {
  MeasureSpec spec = stack_spec({1.0, 2.0});
  const StructureHypothesis hyp = plane_lattice_hypothesis(spec);

  CHECK(hyp.dim() == 2);
  CHECK(hyp.plane_dim() == 1);
  CHECK(hyp.basis(0, 0) == 1.0);
  CHECK(hyp.basis(1, 0) == 0.0);
  REQUIRE(hyp.points.cols() == 7);
  for (int j = -3; j <= 3; ++j) {
    const Index c = static_cast<Index>(j + 3);
    CHECK(hyp.points(0, c) == 0.0);
    CHECK(hyp.points(1, c) == 0.5 * j);
    CHECK(hyp.weights[c] == spec.pattern[static_cast<size_t>(((j % 2) + 2) % 2)]);
  }

  const double h = 2.0 * spec.extent / spec.plane_resolution;
  CHECK(hyp.window.hi[0] == spec.extent + h);
  CHECK(hyp.window.hi[1] == spec.spacing * (spec.count + 0.5));
  CHECK(hyp.window.lo[0] == -(spec.extent + h));

  // Every atom of the generated measure sits inside the window and on a
  // hypothesized plane.
  const Measure mu = generate(spec);
  for (Index i = 0; i < mu.size(); ++i) {
    const Vec x = mu.point(i);
    CHECK(x[0] >= hyp.window.lo[0]);
    CHECK(x[0] <= hyp.window.hi[0]);
    double best = std::numeric_limits<double>::infinity();
    for (Index e = 0; e < hyp.points.cols(); ++e)
      best = std::min(best, std::abs(x[1] - hyp.points(1, e)));
    CHECK(best == 0.0);
  }

  SUBCASE("spec validation") {
    MeasureSpec bad = spec;
    bad.family = "cantor";
    CHECK_THROWS_AS(plane_lattice_hypothesis(bad), Error);
    bad = spec;
    bad.plane_dim = 2;
    CHECK_THROWS_AS(plane_lattice_hypothesis(bad), Error);
    bad = spec;
    bad.spacing = 0.0;
    CHECK_THROWS_AS(plane_lattice_hypothesis(bad), Error);
    bad = spec;
    bad.pattern.clear();
    CHECK_THROWS_AS(plane_lattice_hypothesis(bad), Error);
  }
}
