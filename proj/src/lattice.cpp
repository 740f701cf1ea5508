#include "wolff/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace wolff {

namespace {

constexpr int kMaxLevel = 40;
constexpr long long kMaxCorner = 1LL << 50;

long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

}  // namespace

Cube::Cube(int level_, std::vector<long long> corner_) : level(level_), corner(std::move(corner_)) {
  if (corner.empty()) fail_parameter("Cube: empty corner");
  if (level < -kMaxLevel || level > kMaxLevel) fail_parameter("Cube: |level| exceeds 40");
  for (long long k : corner) {
    if (k < -kMaxCorner || k > kMaxCorner) fail_parameter("Cube: corner magnitude exceeds 2^50");
  }
}

Vec Cube::center() const {
  Vec c(dim());
  for (int a = 0; a < dim(); ++a)
    c[a] = std::ldexp(static_cast<double>(corner[static_cast<size_t>(a)]) + 0.5, level);
  return c;
}

Box Cube::box() const {
  Vec lo(dim()), hi(dim());
  for (int a = 0; a < dim(); ++a) {
    lo[a] = std::ldexp(static_cast<double>(corner[static_cast<size_t>(a)] - 1), level);
    hi[a] = std::ldexp(static_cast<double>(corner[static_cast<size_t>(a)] + 2), level);
  }
  return Box(std::move(lo), std::move(hi));
}

bool cube_less(const Cube& a, const Cube& b) {
  if (a.level != b.level) return a.level > b.level;
  return a.corner < b.corner;
}

Cube root_cube(int d) {
  if (d < 1) fail_parameter("root_cube: dimension must be >= 1");
  return Cube(0, std::vector<long long>(static_cast<size_t>(d), 0));
}

std::string format_cube(const Cube& q) {
  std::ostringstream os;
  os << q.level << ':';
  for (int a = 0; a < q.dim(); ++a) {
    if (a) os << ',';
    os << q.corner[static_cast<size_t>(a)];
  }
  return os.str();
}

Cube parse_cube(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) fail_parameter("parse_cube: missing ':' in '" + text + "'");
  int level = 0;
  try {
    size_t used = 0;
    level = std::stoi(text.substr(0, colon), &used);
    if (used != colon) fail_parameter("parse_cube: bad level in '" + text + "'");
  } catch (const std::exception&) {
    fail_parameter("parse_cube: bad level in '" + text + "'");
  }
  std::vector<long long> corner;
  std::istringstream is(text.substr(colon + 1));
  std::string part;
  while (std::getline(is, part, ',')) {
    try {
      size_t used = 0;
      corner.push_back(std::stoll(part, &used));
      if (used != part.size()) fail_parameter("parse_cube: bad corner '" + part + "'");
    } catch (const std::exception&) {
      fail_parameter("parse_cube: bad corner '" + part + "'");
    }
  }
  if (corner.empty()) fail_parameter("parse_cube: no corner coordinates in '" + text + "'");
  return Cube(level, std::move(corner));
}

Cube grandparent(const Cube& q) {
  std::vector<long long> corner(q.corner.size());
  for (size_t a = 0; a < corner.size(); ++a) corner[a] = floor_div(q.corner[a], 4);
  return Cube(q.level + 2, std::move(corner));
}

double ratio(const Cube& a, const Cube& b) {
  if (a.dim() != b.dim()) fail_parameter("ratio: dimension mismatch");
  return std::abs(a.level - b.level);
}

bool cube_contains(const Cube& outer, const Cube& inner) {
  if (outer.dim() != inner.dim()) fail_parameter("cube_contains: dimension mismatch");
  if (outer.level < inner.level) return false;
  for (int a = 0; a < outer.dim(); ++a) {
    // Endpoints (k-1)*2^m and (k+2)*2^m are exact doubles, so <= is exact.
    double olo = std::ldexp(static_cast<double>(outer.corner[static_cast<size_t>(a)] - 1), outer.level);
    double ohi = std::ldexp(static_cast<double>(outer.corner[static_cast<size_t>(a)] + 2), outer.level);
    double ilo = std::ldexp(static_cast<double>(inner.corner[static_cast<size_t>(a)] - 1), inner.level);
    double ihi = std::ldexp(static_cast<double>(inner.corner[static_cast<size_t>(a)] + 2), inner.level);
    if (!(olo <= ilo && ihi <= ohi)) return false;
  }
  return true;
}

double mass_cube(const Measure& mu, const Cube& q) { return mu.mass_box(q.box()); }

double density(const Measure& mu, const Cube& q, double s) {
  return mass_cube(mu, q) / std::pow(q.side(), s);
}

std::vector<Cube> cubes_containing(const Eigen::Ref<const Vec>& p, int level) {
  const int d = static_cast<int>(p.size());
  std::vector<std::vector<long long>> axis_candidates(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    double t = std::ldexp(p[a], -level);
    if (std::abs(t) > 2.0 * static_cast<double>(kMaxCorner))
      fail_parameter("cubes_containing: point too far from origin for this level");
    long long f = static_cast<long long>(std::floor(t));
    for (long long k = f - 2; k <= f + 1; ++k) {
      double lo = std::ldexp(static_cast<double>(k - 1), level);
      double hi = std::ldexp(static_cast<double>(k + 2), level);
      if (lo < p[a] && p[a] < hi) axis_candidates[static_cast<size_t>(a)].push_back(k);
    }
  }
  std::vector<Cube> out;
  std::vector<size_t> idx(static_cast<size_t>(d), 0);
  while (true) {
    std::vector<long long> corner(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) corner[static_cast<size_t>(a)] = axis_candidates[static_cast<size_t>(a)][idx[static_cast<size_t>(a)]];
    out.emplace_back(level, std::move(corner));
    int a = 0;
    for (; a < d; ++a) {
      if (++idx[static_cast<size_t>(a)] < axis_candidates[static_cast<size_t>(a)].size()) break;
      idx[static_cast<size_t>(a)] = 0;
    }
    if (a == d) break;
  }
  return out;
}

std::optional<size_t> LatticeView::find(const Cube& q) const {
  auto it = std::lower_bound(cubes.begin(), cubes.end(), q, cube_less);
  if (it != cubes.end() && *it == q) return static_cast<size_t>(it - cubes.begin());
  return std::nullopt;
}

LatticeView enumerate_cubes(const Measure& mu, int m_min, int m_max,
                            const std::optional<Box>& restrict_to) {
  if (m_min > m_max) fail_parameter("enumerate_cubes: m_min > m_max");
  if (m_min < -kMaxLevel || m_max > kMaxLevel) fail_parameter("enumerate_cubes: |level| exceeds 40");

  LatticeView view;
  view.m_min = m_min;
  view.m_max = m_max;
  for (int m = m_max; m >= m_min; --m) {
    std::set<std::vector<long long>> corners;
    for (Index i = 0; i < mu.size(); ++i) {
      for (Cube& q : cubes_containing(mu.point(i), m)) {
        if (restrict_to && q.box().disjoint(*restrict_to)) continue;
        corners.insert(std::move(q.corner));
      }
    }
    for (const auto& c : corners) view.cubes.emplace_back(m, c);
  }
  return view;
}

Measure rescale_normalize(const Measure& mu, const Cube& q) {
  const double mass = mass_cube(mu, q);
  if (!(mass > 0.0)) fail_domain("rescale_normalize: cube carries no mass");
  if (q.dim() != mu.dim()) fail_parameter("rescale_normalize: dimension mismatch");

  Mat pts(mu.dim(), mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    for (int a = 0; a < mu.dim(); ++a)
      pts(a, i) = std::ldexp(mu.points()(a, i), -q.level) - static_cast<double>(q.corner[static_cast<size_t>(a)]);
  }
  Vec w = mu.weights() / mass;
  return Measure(std::move(pts), std::move(w), mu.id() + "@" + format_cube(q));
}

}  // namespace wolff
