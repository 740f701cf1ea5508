#include "wolff/kernels.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace wolff {

SmoothBump::SmoothBump(double radius, double alpha) : radius_(radius), alpha_(alpha) {
  if (!(radius > 0.0)) fail_parameter("SmoothBump: radius must be positive");
  if (!(alpha > 0.0) || !(alpha < 1.0)) fail_parameter("SmoothBump: alpha must lie in (0, 1)");
  // Certify sup_t (g + t|g'|) by dense scan; the profile is piecewise smooth
  // so a fine grid plus a small safety factor gives a sound upper bound.
  const int samples = 4096;
  double worst = 1.0;  // value on the plateau
  for (int i = 0; i <= samples; ++i) {
    const double t = radius * i / samples;
    worst = std::max(worst, cutoff(t) + t * std::abs(cutoff_deriv(t)));
  }
  scale_ = 1.0 / (worst * (1.0 + 1e-4));
}

double SmoothBump::cutoff(double t) const {
  const double a = alpha_ * radius_;
  if (t <= a) return 1.0;
  if (t >= radius_) return 0.0;
  const double u = (t - a) / (radius_ - a);
  return (1.0 - u) * (1.0 - u) * (1.0 + 2.0 * u);
}

double SmoothBump::cutoff_deriv(double t) const {
  const double a = alpha_ * radius_;
  if (t <= a || t >= radius_) return 0.0;
  const double u = (t - a) / (radius_ - a);
  return -6.0 * u * (1.0 - u) / (radius_ - a);
}

Kernel Kernel::riesz(int d, double s) {
  if (d < 1) fail_parameter("Kernel: dimension must be >= 1");
  if (!(s > 0.0)) fail_parameter("Kernel: s must be positive");
  return Kernel(Type::riesz, d, s);
}

Kernel Kernel::smooth_odd(int d, double s, SmoothBump bump) {
  Kernel k = riesz(d, s);
  k.type_ = Type::smooth_odd;
  k.bump_.push_back(std::move(bump));
  return k;
}

Kernel Kernel::random_composite(int d, double s, SmoothBump base, int n0, uint64_t seed) {
  if (n0 < 0) fail_parameter("Kernel: n0 must be >= 0");
  Kernel k = riesz(d, s);
  k.type_ = Type::random_composite;
  k.bump_.push_back(std::move(base));
  k.n0_ = n0;
  std::mt19937_64 rng(seed);
  k.signs_.resize(static_cast<size_t>(2 * n0 + 1));
  for (int& sgn : k.signs_) sgn = (rng() & 1u) ? 1 : -1;
  return k;
}

Vec Kernel::eval(const Eigen::Ref<const Vec>& x) const {
  switch (type_) {
    case Type::riesz: {
      const double r = x.norm();
      return x / std::pow(r, s_ + 1.0);
    }
    case Type::smooth_odd: {
      Vec v(1);
      v[0] = bump_[0](x);
      return v;
    }
    case Type::random_composite: {
      const SmoothBump& phi = bump_[0];
      const double r = x.norm();
      double acc = 0.0;
      for (int n = -n0_; n <= n0_; ++n) {
        const double sc = std::exp2(static_cast<double>(-n));
        if (r * sc >= phi.radius()) continue;  // outside the bump's support
        acc += signs_[static_cast<size_t>(n + n0_)] * std::pow(3.0, -s_) *
               std::exp2(-s_ * static_cast<double>(n)) * phi(x * sc);
      }
      Vec v(1);
      v[0] = acc;
      return v;
    }
  }
  fail_numeric("Kernel: unreachable");
}

CzCertificate cz_certificate(const Kernel& k, double r_lo, double r_hi, int n_radii,
                             int n_directions, uint64_t seed) {
  if (!(r_lo > 0.0) || !(r_lo < r_hi)) fail_parameter("cz_certificate: need 0 < r_lo < r_hi");
  if (n_radii < 2 || n_directions < 1) fail_parameter("cz_certificate: too few samples");
  const int d = k.dim();

  // Axes first, then seeded random unit directions.
  std::vector<Vec> dirs;
  for (int a = 0; a < d && static_cast<int>(dirs.size()) < n_directions; ++a)
    dirs.push_back(Vec::Unit(d, a));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  while (static_cast<int>(dirs.size()) < n_directions) {
    Vec v(d);
    for (int a = 0; a < d; ++a) v[a] = gauss(rng);
    const double n = v.norm();
    if (n > 1e-12) dirs.push_back(v / n);
  }

  CzCertificate cert;
  const double log_lo = std::log(r_lo), log_hi = std::log(r_hi);
  for (int i = 0; i < n_radii; ++i) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * i / (n_radii - 1));
    for (const Vec& u : dirs) {
      const Vec x = r * u;
      const double size = k.eval(x).norm() * std::pow(r, k.s());
      if (size > cert.size_constant) {
        cert.size_constant = size;
        cert.worst_radius = r;
      }
      // Central-difference gradient, step 1e-5 * |x|.
      const double h = 1e-5 * r;
      double frob = 0.0;
      for (int a = 0; a < d; ++a) {
        Vec dx = Vec::Zero(d);
        dx[a] = h;
        frob += ((k.eval(x + dx) - k.eval(x - dx)) / (2.0 * h)).squaredNorm();
      }
      const double grad = std::sqrt(frob) * std::pow(r, k.s() + 1.0);
      cert.gradient_constant = std::max(cert.gradient_constant, grad);
    }
  }
  return cert;
}

TestFunctionFamily TestFunctionFamily::standard(int count, const std::vector<double>& alphas) {
  if (count < 1) fail_parameter("TestFunctionFamily: count must be >= 1");
  if (alphas.empty()) fail_parameter("TestFunctionFamily: need at least one alpha");
  TestFunctionFamily fam;
  for (int j = 1; j <= count; ++j) {
    for (double a : alphas) fam.members.emplace_back(static_cast<double>(j), a);
  }
  return fam;
}

Kernel parse_kernel(const std::string& text, int d, double s, uint64_t seed) {
  if (text == "riesz") return Kernel::riesz(d, s);
  auto parse_tail = [&](const std::string& tail) {
    size_t pos = 0;
    double radius = 0.0;
    int n0 = -1;
    try {
      radius = std::stod(tail, &pos);
      if (pos < tail.size()) {
        if (tail[pos] != ',') fail_parameter("kernel spec: expected ',' in '" + text + "'");
        size_t pos2 = 0;
        n0 = std::stoi(tail.substr(pos + 1), &pos2);
        if (pos + 1 + pos2 != tail.size())
          fail_parameter("kernel spec: trailing characters in '" + text + "'");
      }
    } catch (const std::logic_error&) {
      fail_parameter("kernel spec: cannot parse '" + text + "'");
    }
    return std::pair<double, int>(radius, n0);
  };
  if (text.rfind("smooth:", 0) == 0) {
    auto [radius, n0] = parse_tail(text.substr(7));
    if (n0 >= 0) fail_parameter("kernel spec: smooth kernel takes a single radius");
    return Kernel::smooth_odd(d, s, SmoothBump(radius, 0.5));
  }
  if (text.rfind("random:", 0) == 0) {
    auto [radius, n0] = parse_tail(text.substr(7));
    if (n0 < 0) fail_parameter("kernel spec: random kernel needs '<R>,<n0>'");
    return Kernel::random_composite(d, s, SmoothBump(radius, 0.5), n0, seed);
  }
  fail_parameter("kernel spec: unknown kind '" + text + "'");
}

}  // namespace wolff
