#include "wolff/reflectionless.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace wolff {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) {
      if (it.key() == a) { ok = true; break; }
    }
    if (!ok) fail_parameter("hypothesis: unknown key '" + it.key() + "'");
  }
}

Mat columns_from_json(const json& j, int d, const char* what) {
  if (!j.is_array()) fail_parameter(std::string("hypothesis: ") + what + " must be an array");
  Mat out(d, static_cast<Index>(j.size()));
  Index col = 0;
  for (const auto& entry : j) {
    auto v = entry.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != d)
      fail_parameter(std::string("hypothesis: ") + what + " entries must have length d");
    out.col(col++) = Eigen::Map<const Vec>(v.data(), d);
  }
  return out;
}

json columns_to_json(const Mat& m) {
  json out = json::array();
  for (Index c = 0; c < m.cols(); ++c) {
    json row = json::array();
    for (Index r = 0; r < m.rows(); ++r) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

bool closed_contains(const Box& box, const Eigen::Ref<const Vec>& p) {
  for (int a = 0; a < p.size(); ++a) {
    if (p[a] < box.lo[a] || p[a] > box.hi[a]) return false;
  }
  return true;
}

std::string format_point(const Eigen::Ref<const Vec>& p) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < p.size(); ++a) {
    if (a) os << ", ";
    os << p[a];
  }
  os << ")";
  return os.str();
}

}  // namespace

StructureHypothesis StructureHypothesis::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_parameter(std::string("hypothesis: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) fail_parameter("hypothesis: top level must be an object");
  check_keys(j, {"d", "basis", "points", "weights", "window"});

  StructureHypothesis hyp;
  try {
    const int d = j.at("d").get<int>();
    if (d < 1) fail_parameter("hypothesis: d must be positive");
    hyp.basis = columns_from_json(j.at("basis"), d, "basis");
    hyp.points = columns_from_json(j.at("points"), d, "points");
    auto w = j.at("weights").get<std::vector<double>>();
    hyp.weights = Eigen::Map<const Vec>(w.data(), static_cast<Index>(w.size()));
    const json& win = j.at("window");
    check_keys(win, {"lo", "hi"});
    auto lo = win.at("lo").get<std::vector<double>>();
    auto hi = win.at("hi").get<std::vector<double>>();
    if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
      fail_parameter("hypothesis: window bounds must have length d");
    hyp.window.lo = Eigen::Map<const Vec>(lo.data(), d);
    hyp.window.hi = Eigen::Map<const Vec>(hi.data(), d);
  } catch (const json::exception& e) {
    fail_parameter(std::string("hypothesis: ") + e.what());
  }
  if (hyp.weights.size() != hyp.points.cols())
    fail_parameter("hypothesis: one weight per base point required");
  if (hyp.points.cols() == 0) fail_parameter("hypothesis: base point set is empty");
  if ((hyp.weights.array() < 0.0).any())
    fail_parameter("hypothesis: weights must be nonnegative");
  if (hyp.window.empty()) fail_parameter("hypothesis: empty window");
  return hyp;
}

std::string StructureHypothesis::to_json_text() const {
  json j;
  j["d"] = dim();
  j["basis"] = columns_to_json(basis);
  j["points"] = columns_to_json(points);
  j["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
  j["window"]["lo"] = std::vector<double>(window.lo.data(), window.lo.data() + window.lo.size());
  j["window"]["hi"] = std::vector<double>(window.hi.data(), window.hi.data() + window.hi.size());
  return j.dump(2);
}

StructureHypothesis load_hypothesis(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail_io("cannot open: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return StructureHypothesis::from_json_text(buf.str());
}

void save_hypothesis(const StructureHypothesis& hyp, const std::string& path) {
  std::ofstream os(path);
  if (!os) fail_io("cannot open for writing: " + path);
  os << hyp.to_json_text() << "\n";
  if (!os) fail_io("write failed: " + path);
}

DefectReport reflectionless_defect(const Measure& mu, const SmoothBump& phi, const Box& window) {
  std::vector<Index> inside;
  for (Index i = 0; i < mu.size(); ++i) {
    if (window.contains(mu.point(i))) inside.push_back(i);
  }
  if (inside.empty()) fail_domain("reflectionless_defect: no atoms in the window");

  std::vector<double> values;
  values.reserve(inside.size());
  for (Index i : inside) {
    const Vec x = mu.point(i);
    double acc = 0.0;
    for (Index j = 0; j < mu.size(); ++j) acc += phi(x - mu.point(j)) * mu.weight(j);
    values.push_back(acc);
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const size_t m = sorted.size();
  const double median =
      m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  DefectReport rep;
  rep.reference = median;
  rep.count = static_cast<Index>(m);
  for (double v : values) rep.defect = std::max(rep.defect, std::abs(v - median));
  return rep;
}

double ball_difference(const Measure& mu, const Vec& x, const Vec& z, double r) {
  if (!(r > 0.0)) fail_parameter("ball_difference: radius must be positive");
  return mu.mass_ball(x + z, r) - mu.mass_ball(x - z, r);
}

namespace {

// Quantized-coordinate identity for closure bookkeeping.
struct PointKey {
  std::vector<int64_t> q;
  bool operator==(const PointKey& o) const { return q == o.q; }
};

struct PointKeyHash {
  size_t operator()(const PointKey& k) const {
    size_t h = 1469598103934665603ull;
    for (int64_t v : k.q) {
      h ^= static_cast<size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

ClosureResult reflection_closure(const std::vector<Vec>& support,
                                 const std::vector<std::pair<Index, Index>>& pairs,
                                 const Box& window, const ClosureOptions& opts) {
  if (support.empty()) fail_parameter("reflection_closure: empty support");
  if (window.empty()) fail_parameter("reflection_closure: empty window");
  if (!(opts.merge_tol > 0.0)) fail_parameter("reflection_closure: merge_tol must be positive");
  const int d = static_cast<int>(support.front().size());
  double diam = 0.0;
  for (int a = 0; a < d; ++a) diam = std::max(diam, window.side(a));
  const double quantum = opts.merge_tol * std::max(diam, 1.0);

  ClosureResult res;
  std::unordered_set<PointKey, PointKeyHash> seen;
  auto key_of = [&](const Vec& p) {
    PointKey k;
    k.q.resize(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a)
      k.q[static_cast<size_t>(a)] = static_cast<int64_t>(std::llround(p[a] / quantum));
    return k;
  };
  auto try_add = [&](const Vec& p) {
    if (!closed_contains(window, p)) return false;
    const PointKey key = key_of(p);
    if (seen.count(key)) return false;
    if (static_cast<Index>(res.points.size()) >= opts.max_points) {
      res.truncated = true;
      return false;
    }
    seen.insert(key);
    res.points.push_back(p);
    return true;
  };
  for (const Vec& p : support) {
    if (static_cast<int>(p.size()) != d)
      fail_parameter("reflection_closure: mixed point dimensions");
    try_add(p);
  }
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= static_cast<Index>(support.size()) ||
        b >= static_cast<Index>(support.size()))
      fail_parameter("reflection_closure: pair index out of range");
  }

  // Progression through (p, q): all integer steps k with p + k(q - p) inside
  // the window; the window bounds the admissible k range.  Arguments are
  // taken by value because try_add may reallocate the point store.
  auto emit_progression = [&](const Vec p, const Vec q) {
    const Vec dir = q - p;
    if (dir.cwiseAbs().maxCoeff() <= quantum) return;
    double k_lo = -std::numeric_limits<double>::infinity();
    double k_hi = std::numeric_limits<double>::infinity();
    for (int a = 0; a < d; ++a) {
      if (dir[a] == 0.0) {
        if (p[a] < window.lo[a] || p[a] > window.hi[a]) return;
        continue;
      }
      double t0 = (window.lo[a] - p[a]) / dir[a];
      double t1 = (window.hi[a] - p[a]) / dir[a];
      if (t0 > t1) std::swap(t0, t1);
      k_lo = std::max(k_lo, t0);
      k_hi = std::min(k_hi, t1);
    }
    if (!(k_lo <= k_hi)) return;
    const int64_t first = static_cast<int64_t>(std::ceil(k_lo - 1e-12));
    const int64_t last = static_cast<int64_t>(std::floor(k_hi + 1e-12));
    const int64_t span_cap = 16 * static_cast<int64_t>(opts.max_points);
    int64_t hi = last;
    if (last - first > span_cap) {
      hi = first + span_cap;
      res.truncated = true;
    }
    for (int64_t k = first; k <= hi; ++k) try_add(p + static_cast<double>(k) * dir);
  };

  if (!pairs.empty()) {
    // Fixed generating pairs: one pass reaches the fixed point, because the
    // progression through (x, y) already contains every point it generates.
    res.sweeps = 1;
    for (const auto& [a, b] : pairs) {
      emit_progression(support[static_cast<size_t>(a)], support[static_cast<size_t>(b)]);
      emit_progression(support[static_cast<size_t>(b)], support[static_cast<size_t>(a)]);
    }
  } else {
    // All-pairs mode: sweep until no pair with at least one fresh endpoint
    // produces a new point.
    size_t frontier = 0;
    for (;;) {
      ++res.sweeps;
      const size_t count = res.points.size();
      for (size_t j = frontier; j < count; ++j) {
        for (size_t i = 0; i < j; ++i) {
          emit_progression(res.points[i], res.points[j]);
          emit_progression(res.points[j], res.points[i]);
        }
      }
      if (res.points.size() == count || res.truncated) break;
      frontier = count;
    }
  }

  res.min_spacing = 0.0;
  if (res.points.size() >= 2) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < res.points.size(); ++i) {
      for (size_t j = i + 1; j < res.points.size(); ++j) {
        best = std::min(best, (res.points[i] - res.points[j]).norm());
      }
    }
    res.min_spacing = best;
  }
  res.uniformly_discrete = res.points.size() < 2 || res.min_spacing >= opts.spacing_floor;
  return res;
}

StructureReport verify_structure(const Measure& mu, const StructureHypothesis& hyp, double tol,
                                 const VerifyOptions& opts) {
  if (!(tol > 0.0)) fail_parameter("verify_structure: tol must be positive");
  if (hyp.dim() != mu.dim()) fail_parameter("verify_structure: dimension mismatch");
  const Mat& b = hyp.basis;
  if (b.cols() < 1 || b.cols() > b.rows())
    fail_domain("verify_structure: plane dimension out of range");
  if ((b.transpose() * b - Mat::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff() > 1e-8)
    fail_domain("verify_structure: basis is not orthonormal");

  StructureReport rep;
  auto add = [&](const std::string& check, const std::string& loc, double mag) {
    ++rep.violation_count;
    if (static_cast<Index>(rep.violations.size()) < opts.max_listed)
      rep.violations.push_back({check, loc, mag});
  };

  const Index m = hyp.points.cols();
  for (Index e = 0; e < m; ++e) {
    const double along = (b.transpose() * hyp.points.col(e)).norm();
    if (along > tol)
      add("orthogonality", "base point " + std::to_string(e), along);
  }

  // (a) atoms near some plane V + x_e; remember the best plane per atom.
  std::vector<Index> plane_of(static_cast<size_t>(mu.size()), -1);
  for (Index i = 0; i < mu.size(); ++i) {
    const Vec x = mu.point(i);
    double best = std::numeric_limits<double>::infinity();
    Index arg = -1;
    for (Index e = 0; e < m; ++e) {
      const Vec off = x - hyp.points.col(e);
      const double dist = (off - b * (b.transpose() * off)).norm();
      if (dist < best) {
        best = dist;
        arg = e;
      }
    }
    rep.max_plane_distance = std::max(rep.max_plane_distance, best);
    if (best > tol) {
      add("plane-distance", format_point(x), best);
    } else {
      plane_of[static_cast<size_t>(i)] = arg;
    }
  }

  // (b) uniform ball mass along each plane, sampled at interior atoms.
  double radius = opts.ball_radius;
  if (!(radius > 0.0)) {
    auto gap = mu.min_gap();
    radius = gap ? 1.7 * *gap : 1.0;
  }
  for (Index e = 0; e < m; ++e) {
    std::vector<Index> members;
    for (Index i = 0; i < mu.size(); ++i) {
      if (plane_of[static_cast<size_t>(i)] == e) members.push_back(i);
    }
    if (members.size() < 2) continue;
    Vec lo = mu.point(members.front());
    Vec hi = lo;
    for (Index i : members) {
      lo = lo.cwiseMin(mu.point(i));
      hi = hi.cwiseMax(mu.point(i));
    }
    double mass_lo = std::numeric_limits<double>::infinity();
    double mass_hi = 0.0;
    Index worst = -1;
    for (Index i : members) {
      const Vec x = mu.point(i);
      bool interior = true;
      for (int a = 0; a < mu.dim(); ++a) {
        if (hi[a] - lo[a] > radius && (x[a] - lo[a] < radius || hi[a] - x[a] < radius)) {
          interior = false;
          break;
        }
      }
      if (!interior) continue;
      const double mass = mu.mass_ball(x, radius);
      if (mass < mass_lo) mass_lo = mass;
      if (mass > mass_hi) {
        mass_hi = mass;
        worst = i;
      }
    }
    if (worst >= 0 && mass_hi > 0.0) {
      const double spread = (mass_hi - mass_lo) / mass_hi;
      rep.mass_spread = std::max(rep.mass_spread, spread);
      if (spread > tol) add("uniform-mass", "plane " + std::to_string(e), spread);
    }
  }

  // (c) base-set discreteness and symmetry about each base point.
  rep.min_base_spacing = std::numeric_limits<double>::infinity();
  for (Index e = 0; e < m; ++e) {
    for (Index e2 = e + 1; e2 < m; ++e2) {
      rep.min_base_spacing =
          std::min(rep.min_base_spacing, (hyp.points.col(e) - hyp.points.col(e2)).norm());
    }
  }
  if (m < 2) rep.min_base_spacing = 0.0;
  if (m >= 2 && rep.min_base_spacing <= tol)
    add("discreteness", "base set", rep.min_base_spacing);

  for (Index e = 0; e < m; ++e) {
    for (Index c = 0; c < m; ++c) {
      const Vec refl = 2.0 * hyp.points.col(c) - hyp.points.col(e);
      if (!closed_contains(hyp.window, refl)) continue;
      double best = std::numeric_limits<double>::infinity();
      Index arg = -1;
      for (Index e2 = 0; e2 < m; ++e2) {
        const double dist = (refl - hyp.points.col(e2)).norm();
        if (dist < best) {
          best = dist;
          arg = e2;
        }
      }
      if (best > tol) {
        add("symmetry-set", format_point(refl), best);
      } else {
        const double gap = std::abs(hyp.weights[e] - hyp.weights[arg]);
        if (gap > tol * std::max(1.0, hyp.weights.cwiseAbs().maxCoeff()))
          add("symmetry-weight", format_point(refl), gap);
      }
    }
  }

  rep.pass = rep.violation_count == 0;
  return rep;
}

bool dimension_window_check(const StructureHypothesis& hyp, const Ambient& ambient) {
  const double fl = std::floor(ambient.s);
  const double k = static_cast<double>(hyp.plane_dim());
  return fl < k && k < fl + 1.0;
}

StructureHypothesis plane_lattice_hypothesis(const MeasureSpec& spec) {
  if (spec.family != "plane-lattice")
    fail_parameter("plane_lattice_hypothesis: spec family must be plane-lattice");
  const int d = spec.d, k = spec.plane_dim;
  if (k < 1 || k >= d)
    fail_parameter("plane_lattice_hypothesis: plane_dim must lie in [1, d-1]");
  if (!(spec.spacing > 0.0)) fail_parameter("plane_lattice_hypothesis: spacing must be positive");
  if (spec.pattern.empty()) fail_parameter("plane_lattice_hypothesis: empty weight pattern");

  const int q = d - k;
  const int stack = 2 * spec.count + 1;
  Index n_planes = 1;
  for (int a = 0; a < q; ++a) n_planes *= stack;
  const int L = static_cast<int>(spec.pattern.size());

  StructureHypothesis hyp;
  hyp.basis = Mat::Zero(d, k);
  for (int a = 0; a < k; ++a) hyp.basis(a, a) = 1.0;
  hyp.points = Mat::Zero(d, n_planes);
  hyp.weights = Vec::Zero(n_planes);

  // Same odometer as the generator, so base coordinates match its atoms
  // bit for bit.
  std::vector<int> j(static_cast<size_t>(q), -spec.count);
  for (Index p = 0; p < n_planes; ++p) {
    int jsum = 0;
    for (int a = 0; a < q; ++a) jsum += j[static_cast<size_t>(a)];
    hyp.weights[p] = spec.pattern[static_cast<size_t>(((jsum % L) + L) % L)];
    for (int a = 0; a < q; ++a) hyp.points(k + a, p) = spec.spacing * j[static_cast<size_t>(a)];
    for (int a = 0; a < q; ++a) {
      if (++j[static_cast<size_t>(a)] <= spec.count) break;
      j[static_cast<size_t>(a)] = -spec.count;
    }
  }

  const double h = 2.0 * spec.extent / std::max(spec.plane_resolution, 1);
  hyp.window.lo = Vec::Zero(d);
  hyp.window.hi = Vec::Zero(d);
  for (int a = 0; a < k; ++a) {
    hyp.window.lo[a] = -(spec.extent + h);
    hyp.window.hi[a] = spec.extent + h;
  }
  for (int a = k; a < d; ++a) {
    hyp.window.lo[a] = -spec.spacing * (spec.count + 0.5);
    hyp.window.hi[a] = spec.spacing * (spec.count + 0.5);
  }
  return hyp;
}

}  // namespace wolff
