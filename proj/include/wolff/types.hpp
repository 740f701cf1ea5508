#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace wolff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Typed failure surfaced by any library entry point.  kind() separates bad
// call arguments, mathematically invalid inputs, aborted searches, solver
// breakdowns, and I/O trouble so callers (and the CLI) can react precisely.
class Error : public std::runtime_error {
 public:
  enum class Kind { parameter, domain, capacity, numeric, io };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void fail_parameter(const std::string& msg) { throw Error(Error::Kind::parameter, msg); }
[[noreturn]] inline void fail_domain(const std::string& msg) { throw Error(Error::Kind::domain, msg); }
[[noreturn]] inline void fail_capacity(const std::string& msg) { throw Error(Error::Kind::capacity, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw Error(Error::Kind::numeric, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(Error::Kind::io, msg); }

// Ambient data shared by every computation: dimension d, fractional index
// s in (0, d), and the selection margin eps > 0.
struct Ambient {
  int d = 1;
  double s = 0.5;
  double eps = 0.1;

  Ambient() = default;
  Ambient(int d_, double s_, double eps_) : d(d_), s(s_), eps(eps_) {
    if (d < 1) fail_parameter("Ambient: dimension must be >= 1");
    if (!(s > 0.0) || !(s < static_cast<double>(d))) fail_parameter("Ambient: s must lie in (0, d)");
    if (!(eps > 0.0)) fail_parameter("Ambient: eps must be positive");
  }
};

// True when the open interval (s - eps, s + eps) contains an integer.  The
// rescaling arguments require this to be false; experiment configs check it.
inline bool band_contains_integer(double s, double eps) {
  double lo = s - eps, hi = s + eps;
  double k = std::ceil(lo);
  return k < hi && k > lo;
}

// Open axis-aligned box.  All membership predicates are strict so that the
// open-cube conventions of the lattice are honored exactly: endpoints are
// dyadic rationals, comparisons are plain IEEE comparisons, no epsilons.
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) fail_parameter("Box: corner dimensions differ");
  }

  static Box centered(const Vec& center, double side) {
    return Box(center.array() - side / 2.0, center.array() + side / 2.0);
  }

  int dim() const { return static_cast<int>(lo.size()); }
  Vec center() const { return 0.5 * (lo + hi); }
  double side(int axis) const { return hi[axis] - lo[axis]; }

  bool contains(const Eigen::Ref<const Vec>& p) const {
    return (p.array() > lo.array()).all() && (p.array() < hi.array()).all();
  }
  // Containment / disjointness of open boxes (both assumed nonempty).
  bool contains_box(const Box& b) const {
    return (lo.array() <= b.lo.array()).all() && (b.hi.array() <= hi.array()).all();
  }
  bool disjoint(const Box& b) const {
    return ((hi.array() <= b.lo.array()) || (b.hi.array() <= lo.array())).any();
  }
  // Concentric dilation by factor a > 0.
  Box dilated(double a) const {
    Vec c = center();
    Vec h = 0.5 * a * (hi - lo);
    return Box(c - h, c + h);
  }
  // Box shrunk by margin m on every face (caller must keep it nonempty).
  Box shrunk(double m) const { return Box(lo.array() + m, hi.array() - m); }
  bool empty() const { return (hi.array() <= lo.array()).any(); }

  double min_face_distance(const Eigen::Ref<const Vec>& p) const {
    return std::min((p - lo).minCoeff(), (hi - p).minCoeff());
  }
};

// Deterministic tree reduction: the result depends only on the values and
// their order, never on threading or chunking of the caller.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace wolff
