#include "wolff/measure.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace wolff {

namespace {

constexpr Index kLeafSize = 32;
constexpr Index kMaxAtoms = Index(1) << 22;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Measure::Measure(Mat points, Vec weights, std::string id) : id_(std::move(id)) {
  if (points.cols() != weights.size()) fail_parameter("Measure: point/weight counts differ");
  if (points.rows() < 1 && points.cols() > 0) fail_parameter("Measure: ambient dimension must be >= 1");
  if (!points.allFinite()) fail_parameter("Measure: non-finite coordinate");
  for (Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] <= 0.0)
      fail_parameter("Measure: weights must be positive and finite");
  }

  const Index n = points.cols();
  const int d = static_cast<int>(points.rows());
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (int k = 0; k < d; ++k) {
      if (points(k, a) != points(k, b)) return points(k, a) < points(k, b);
    }
    return weights[a] < weights[b];
  });

  points_.resize(d, n);
  weights_.resize(n);
  for (Index i = 0; i < n; ++i) {
    points_.col(i) = points.col(order[static_cast<size_t>(i)]);
    weights_[i] = weights[order[static_cast<size_t>(i)]];
  }

  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += weights_[i];
  total_mass_ = acc;

  if (n > 0) {
    nodes_.reserve(static_cast<size_t>(2 * (n / kLeafSize + 2)));
    build_node(0, n);
  }
}

int Measure::build_node(Index begin, Index end) {
  const int me = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Node node;
  node.begin = begin;
  node.end = end;
  node.blo = points_.col(begin);
  node.bhi = points_.col(begin);
  for (Index i = begin + 1; i < end; ++i) {
    node.blo = node.blo.cwiseMin(points_.col(i));
    node.bhi = node.bhi.cwiseMax(points_.col(i));
  }
  if (end - begin > kLeafSize) {
    Index mid = begin + (end - begin) / 2;
    node.left = build_node(begin, mid);
    node.right = build_node(mid, end);
  }
  nodes_[static_cast<size_t>(me)] = std::move(node);
  return me;
}

template <class Inside, class NodeInside, class NodeDisjoint, class Visit>
void Measure::query(const Inside& inside, const NodeInside& node_inside,
                    const NodeDisjoint& node_disjoint, const Visit& visit) const {
  if (nodes_.empty()) return;
  // Explicit stack, children pushed right-then-left so atoms are visited in
  // ascending storage order (this keeps accumulation order identical to a
  // brute-force scan).
  std::vector<int> stack = {0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<size_t>(stack.back())];
    stack.pop_back();
    if (node_disjoint(node.blo, node.bhi)) continue;
    if (node_inside(node.blo, node.bhi)) {
      for (Index i = node.begin; i < node.end; ++i) visit(i);
      continue;
    }
    if (node.left < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        if (inside(i)) visit(i);
      }
      continue;
    }
    stack.push_back(node.right);
    stack.push_back(node.left);
  }
}

namespace {

// Squared distance from c to the nearest / farthest point of the closed box
// [blo, bhi].
double near_sq(const Vec& c, const Vec& blo, const Vec& bhi) {
  double acc = 0.0;
  for (Index k = 0; k < c.size(); ++k) {
    double t = std::max({blo[k] - c[k], c[k] - bhi[k], 0.0});
    acc += t * t;
  }
  return acc;
}

double far_sq(const Vec& c, const Vec& blo, const Vec& bhi) {
  double acc = 0.0;
  for (Index k = 0; k < c.size(); ++k) {
    double t = std::max(std::abs(blo[k] - c[k]), std::abs(bhi[k] - c[k]));
    acc += t * t;
  }
  return acc;
}

}  // namespace

double Measure::mass_ball(const Eigen::Ref<const Vec>& center, double r) const {
  if (center.size() != dim() && size() > 0) fail_parameter("mass_ball: center dimension mismatch");
  if (!(r > 0.0)) return 0.0;
  const double r2 = r * r;
  double acc = 0.0;
  // Whole-node shortcuts keep a relative safety margin; borderline nodes fall
  // through to exact per-atom tests, so results match brute force exactly.
  query(
      [&](Index i) { return (points_.col(i) - center).squaredNorm() < r2; },
      [&](const Vec& blo, const Vec& bhi) { return far_sq(center, blo, bhi) < r2 * (1.0 - 1e-9); },
      [&](const Vec& blo, const Vec& bhi) { return near_sq(center, blo, bhi) > r2 * (1.0 + 1e-9); },
      [&](Index i) { acc += weights_[i]; });
  return acc;
}

double Measure::mass_box(const Box& box) const {
  if (size() > 0 && box.dim() != dim()) fail_parameter("mass_box: box dimension mismatch");
  double acc = 0.0;
  query(
      [&](Index i) { return box.contains(points_.col(i)); },
      [&](const Vec& blo, const Vec& bhi) {
        return (blo.array() > box.lo.array()).all() && (bhi.array() < box.hi.array()).all();
      },
      [&](const Vec& blo, const Vec& bhi) {
        return ((bhi.array() <= box.lo.array()) || (blo.array() >= box.hi.array())).any();
      },
      [&](Index i) { acc += weights_[i]; });
  return acc;
}

std::vector<Index> Measure::atoms_in_ball(const Eigen::Ref<const Vec>& center, double r) const {
  std::vector<Index> out;
  if (!(r > 0.0) || size() == 0) return out;
  const double r2 = r * r;
  query(
      [&](Index i) { return (points_.col(i) - center).squaredNorm() < r2; },
      [&](const Vec& blo, const Vec& bhi) { return far_sq(center, blo, bhi) < r2 * (1.0 - 1e-9); },
      [&](const Vec& blo, const Vec& bhi) { return near_sq(center, blo, bhi) > r2 * (1.0 + 1e-9); },
      [&](Index i) { out.push_back(i); });
  return out;
}

std::vector<Index> Measure::atoms_in_box(const Box& box) const {
  std::vector<Index> out;
  if (size() == 0) return out;
  query(
      [&](Index i) { return box.contains(points_.col(i)); },
      [&](const Vec& blo, const Vec& bhi) {
        return (blo.array() > box.lo.array()).all() && (bhi.array() < box.hi.array()).all();
      },
      [&](const Vec& blo, const Vec& bhi) {
        return ((bhi.array() <= box.lo.array()) || (blo.array() >= box.hi.array())).any();
      },
      [&](Index i) { out.push_back(i); });
  return out;
}

Box Measure::support_box() const {
  if (size() == 0) fail_domain("support_box: empty measure");
  return Box(nodes_[0].blo, nodes_[0].bhi);
}

void Measure::scan_pairs() const {
  if (pairs_scanned_) return;
  double best = std::numeric_limits<double>::infinity();
  double diam = 0.0;
  const Index n = size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      double d2 = (points_.col(i) - points_.col(j)).squaredNorm();
      if (d2 > 0.0 && d2 < best) best = d2;
      if (d2 > diam) diam = d2;
    }
  }
  if (std::isfinite(best)) min_gap_ = std::sqrt(best);
  diameter_ = std::sqrt(diam);
  pairs_scanned_ = true;
}

std::optional<double> Measure::min_gap() const {
  scan_pairs();
  return min_gap_;
}

double Measure::diameter() const {
  scan_pairs();
  return diameter_;
}

double Measure::default_r_min() const {
  auto gap = min_gap();
  if (!gap) fail_domain("default_r_min: no positive pairwise distance; pass r_min explicitly");
  return *gap / 2.0;
}

double Measure::default_r_max() const {
  double d = diameter();
  if (!(d > 0.0)) fail_domain("default_r_max: support diameter is zero; pass r_max explicitly");
  return 2.0 * d;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

Vec resolved_origin(const MeasureSpec& spec) {
  if (spec.origin.size() == 0) return Vec::Zero(spec.d);
  if (spec.origin.size() != spec.d) fail_parameter("spec: origin dimension mismatch");
  return spec.origin;
}

Measure generate_cantor(const MeasureSpec& spec) {
  if (!(spec.lambda > 0.0) || spec.lambda > 0.5)
    fail_parameter("cantor: lambda must lie in (0, 1/2]");
  if (spec.generations < 0) fail_parameter("cantor: generations must be >= 0");
  if (!(spec.scale > 0.0)) fail_parameter("cantor: scale must be positive");
  if (!(spec.total > 0.0)) fail_parameter("cantor: total mass must be positive");
  const int d = spec.d, n = spec.generations;
  if (static_cast<long long>(d) * n > 22)
    fail_capacity("cantor: 2^(d*generations) atoms exceed the generator cap");

  const Vec origin = resolved_origin(spec);
  std::vector<Vec> pos = {origin};
  double len = spec.scale;
  for (int k = 0; k < n; ++k) {
    const double off = (1.0 - spec.lambda) * len;
    std::vector<Vec> next;
    next.reserve(pos.size() << d);
    for (const Vec& p : pos) {
      for (int corner = 0; corner < (1 << d); ++corner) {
        Vec q = p;
        for (int a = 0; a < d; ++a) {
          if (corner >> a & 1) q[a] += off;
        }
        next.push_back(std::move(q));
      }
    }
    pos = std::move(next);
    len *= spec.lambda;
  }

  Mat pts(d, static_cast<Index>(pos.size()));
  for (Index i = 0; i < pts.cols(); ++i) pts.col(i) = pos[static_cast<size_t>(i)];
  Vec w = Vec::Constant(pts.cols(), spec.total / std::ldexp(1.0, d * n));
  return Measure(std::move(pts), std::move(w), spec.id);
}

Measure generate_lebesgue_cube(const MeasureSpec& spec) {
  if (!(spec.side > 0.0)) fail_parameter("lebesgue-cube: side must be positive");
  if (spec.resolution < 1) fail_parameter("lebesgue-cube: resolution must be >= 1");
  const int d = spec.d;
  double count = std::pow(static_cast<double>(spec.resolution), d);
  if (count > static_cast<double>(kMaxAtoms)) fail_capacity("lebesgue-cube: resolution^d atoms exceed the generator cap");

  const Vec origin = resolved_origin(spec);
  const double h = spec.side / spec.resolution;
  const Index n = static_cast<Index>(count);
  Mat pts(d, n);
  std::vector<int> idx(static_cast<size_t>(d), 0);
  for (Index i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a) pts(a, i) = origin[a] + (idx[static_cast<size_t>(a)] + 0.5) * h;
    for (int a = 0; a < d; ++a) {
      if (++idx[static_cast<size_t>(a)] < spec.resolution) break;
      idx[static_cast<size_t>(a)] = 0;
    }
  }
  Vec w = Vec::Constant(n, std::pow(h, d));
  return Measure(std::move(pts), std::move(w), spec.id);
}

Measure generate_plane_lattice(const MeasureSpec& spec) {
  const int d = spec.d, k = spec.plane_dim;
  if (k < 0 || k >= d) fail_parameter("plane-lattice: plane_dim must lie in [0, d-1]");
  if (!(spec.spacing > 0.0)) fail_parameter("plane-lattice: spacing must be positive");
  if (spec.count < 0) fail_parameter("plane-lattice: count must be >= 0");
  if (!(spec.extent > 0.0)) fail_parameter("plane-lattice: extent must be positive");
  if (spec.plane_resolution < 1) fail_parameter("plane-lattice: plane_resolution must be >= 1");
  if (spec.pattern.empty()) fail_parameter("plane-lattice: weight pattern must be nonempty");
  for (double f : spec.pattern) {
    if (!(f > 0.0) || !std::isfinite(f)) fail_parameter("plane-lattice: pattern weights must be positive");
  }

  const int q = d - k;
  const int stack = 2 * spec.count + 1;
  const double planes = std::pow(static_cast<double>(stack), q);
  const double per_plane = std::pow(static_cast<double>(spec.plane_resolution), k);
  if (planes * per_plane > static_cast<double>(kMaxAtoms))
    fail_capacity("plane-lattice: atom count exceeds the generator cap");

  const double h = 2.0 * spec.extent / spec.plane_resolution;
  const double cell = std::pow(h, k);
  const Index n_planes = static_cast<Index>(planes);
  const Index n_cells = static_cast<Index>(per_plane);
  const int L = static_cast<int>(spec.pattern.size());

  Mat pts(d, n_planes * n_cells);
  Vec w(n_planes * n_cells);
  std::vector<int> j(static_cast<size_t>(std::max(q, 1)), -spec.count);
  Index col = 0;
  for (Index p = 0; p < n_planes; ++p) {
    int jsum = 0;
    for (int a = 0; a < q; ++a) jsum += j[static_cast<size_t>(a)];
    const double f = spec.pattern[static_cast<size_t>(((jsum % L) + L) % L)];
    const double offset =
        spec.stagger ? h * std::fmod(static_cast<double>(p + 1) * 0.6180339887498949, 1.0) : 0.0;

    std::vector<int> idx(static_cast<size_t>(std::max(k, 1)), 0);
    for (Index c = 0; c < n_cells; ++c) {
      for (int a = 0; a < k; ++a)
        pts(a, col) = -spec.extent + (idx[static_cast<size_t>(a)] + 0.5) * h + offset;
      for (int a = 0; a < q; ++a)
        pts(k + a, col) = spec.spacing * j[static_cast<size_t>(a)];
      w[col] = f * cell;
      ++col;
      for (int a = 0; a < k; ++a) {
        if (++idx[static_cast<size_t>(a)] < spec.plane_resolution) break;
        idx[static_cast<size_t>(a)] = 0;
      }
    }
    for (int a = 0; a < q; ++a) {
      if (++j[static_cast<size_t>(a)] <= spec.count) break;
      j[static_cast<size_t>(a)] = -spec.count;
    }
  }
  return Measure(std::move(pts), std::move(w), spec.id);
}

Measure generate_custom(const MeasureSpec& spec) {
  if (spec.points.rows() != spec.d) fail_parameter("custom-points: point dimension mismatch");
  return Measure(spec.points, spec.weights, spec.id);
}

}  // namespace

Measure generate(const MeasureSpec& spec) {
  if (spec.d < 1) fail_parameter("spec: dimension must be >= 1");
  if (spec.family == "cantor") return generate_cantor(spec);
  if (spec.family == "lebesgue-cube") return generate_lebesgue_cube(spec);
  if (spec.family == "plane-lattice") return generate_plane_lattice(spec);
  if (spec.family == "custom-points") return generate_custom(spec);
  fail_parameter("spec: unknown family '" + spec.family + "'");
}

// ---------------------------------------------------------------------------
// JSON spec parsing
// ---------------------------------------------------------------------------

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) {
      if (it.key() == a) { ok = true; break; }
    }
    if (!ok) fail_parameter("spec: unknown key '" + it.key() + "'");
  }
}

}  // namespace

MeasureSpec MeasureSpec::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_parameter(std::string("spec: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) fail_parameter("spec: top level must be an object");

  MeasureSpec spec;
  try {
    spec.family = j.at("family").get<std::string>();
    spec.d = j.at("d").get<int>();
    spec.id = j.value("id", std::string());
    if (j.contains("origin")) {
      auto v = j.at("origin").get<std::vector<double>>();
      spec.origin = Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
    }
    if (spec.family == "cantor") {
      check_keys(j, {"id", "family", "d", "origin", "lambda", "generations", "scale", "total"});
      spec.lambda = j.at("lambda").get<double>();
      spec.generations = j.at("generations").get<int>();
      spec.scale = j.value("scale", 1.0);
      spec.total = j.value("total", 1.0);
    } else if (spec.family == "lebesgue-cube") {
      check_keys(j, {"id", "family", "d", "origin", "side", "resolution"});
      spec.side = j.at("side").get<double>();
      spec.resolution = j.at("resolution").get<int>();
    } else if (spec.family == "plane-lattice") {
      check_keys(j, {"id", "family", "d", "plane_dim", "spacing", "count", "extent",
                     "plane_resolution", "pattern", "stagger"});
      spec.plane_dim = j.at("plane_dim").get<int>();
      spec.spacing = j.at("spacing").get<double>();
      spec.count = j.at("count").get<int>();
      spec.extent = j.at("extent").get<double>();
      spec.plane_resolution = j.at("plane_resolution").get<int>();
      if (j.contains("pattern")) spec.pattern = j.at("pattern").get<std::vector<double>>();
      spec.stagger = j.value("stagger", false);
    } else if (spec.family == "custom-points") {
      check_keys(j, {"id", "family", "d", "points", "weights"});
      auto rows = j.at("points").get<std::vector<std::vector<double>>>();
      auto w = j.at("weights").get<std::vector<double>>();
      if (rows.size() != w.size()) fail_parameter("spec: points/weights count mismatch");
      spec.points.resize(spec.d, static_cast<Index>(rows.size()));
      for (size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) != spec.d)
          fail_parameter("spec: point dimension mismatch");
        for (int a = 0; a < spec.d; ++a) spec.points(a, static_cast<Index>(i)) = rows[i][static_cast<size_t>(a)];
      }
      spec.weights = Eigen::Map<const Vec>(w.data(), static_cast<Index>(w.size()));
    } else {
      fail_parameter("spec: unknown family '" + spec.family + "'");
    }
  } catch (const json::exception& e) {
    fail_parameter(std::string("spec: ") + e.what());
  }
  return spec;
}

std::string MeasureSpec::to_json_text() const {
  json j;
  j["family"] = family;
  j["d"] = d;
  if (!id.empty()) j["id"] = id;
  if (origin.size() > 0) j["origin"] = std::vector<double>(origin.data(), origin.data() + origin.size());
  if (family == "cantor") {
    j["lambda"] = lambda;
    j["generations"] = generations;
    j["scale"] = scale;
    j["total"] = total;
  } else if (family == "lebesgue-cube") {
    j["side"] = side;
    j["resolution"] = resolution;
  } else if (family == "plane-lattice") {
    j["plane_dim"] = plane_dim;
    j["spacing"] = spacing;
    j["count"] = count;
    j["extent"] = extent;
    j["plane_resolution"] = plane_resolution;
    j["pattern"] = pattern;
    j["stagger"] = stagger;
  } else if (family == "custom-points") {
    std::vector<std::vector<double>> rows;
    for (Index i = 0; i < points.cols(); ++i)
      rows.emplace_back(points.col(i).data(), points.col(i).data() + points.rows());
    j["points"] = rows;
    j["weights"] = std::vector<double>(weights.data(), weights.data() + weights.size());
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Text round trip
// ---------------------------------------------------------------------------

void save_measure(std::ostream& os, const Measure& mu) {
  os << "# d=" << mu.dim() << " n=" << mu.size() << "\n";
  for (Index i = 0; i < mu.size(); ++i) {
    for (int a = 0; a < mu.dim(); ++a) os << fmt17(mu.points()(a, i)) << ' ';
    os << fmt17(mu.weight(i)) << "\n";
  }
}

Measure load_measure(std::istream& is, const std::string& id) {
  std::string header;
  if (!std::getline(is, header)) fail_io("measure load: empty stream");
  int d = 0;
  long long n = 0;
  if (std::sscanf(header.c_str(), "# d=%d n=%lld", &d, &n) != 2)
    fail_io("measure load: malformed header '" + header + "'");
  if (d < 1 || n < 0) fail_io("measure load: invalid header values");

  Mat pts(d, static_cast<Index>(n));
  Vec w(static_cast<Index>(n));
  std::string line;
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(is, line)) fail_io("measure load: truncated file");
    std::istringstream ls(line);
    for (int a = 0; a < d; ++a) {
      if (!(ls >> pts(a, static_cast<Index>(i))))
        fail_io("measure load: bad coordinate at atom " + std::to_string(i));
    }
    if (!(ls >> w[static_cast<Index>(i)]))
      fail_io("measure load: bad weight at atom " + std::to_string(i));
  }
  return Measure(std::move(pts), std::move(w), id);
}

void save_measure_file(const std::string& path, const Measure& mu) {
  std::ofstream os(path);
  if (!os) fail_io("cannot open for writing: " + path);
  save_measure(os, mu);
  if (!os) fail_io("write failed: " + path);
}

Measure load_measure_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail_io("cannot open: " + path);
  return load_measure(is, path);
}

}  // namespace wolff
