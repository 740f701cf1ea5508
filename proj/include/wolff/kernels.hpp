#pragma once

#include "wolff/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wolff {

// Odd Lipschitz bump phi(x) = scale * x_1 * g(|x|), where g is a C^1 radial
// cutoff equal to 1 on [0, alpha*R] and descending to 0 at R along a cubic
// ramp.  `scale` normalizes the Lipschitz constant to 1: it is the inverse
// of a certified upper bound of sup_t (g(t) + t*|g'(t)|) >= sup |grad phi|,
// obtained from a dense scan of that one-dimensional profile.
class SmoothBump {
 public:
  SmoothBump(double radius, double alpha);

  double radius() const { return radius_; }
  double alpha() const { return alpha_; }
  double lip_bound() const { return 1.0 / scale_; }  // certified bound of the raw bump

  double operator()(const Eigen::Ref<const Vec>& x) const {
    const double r2 = x.squaredNorm();
    if (r2 >= radius_ * radius_) return 0.0;
    return scale_ * x[0] * cutoff(std::sqrt(r2));
  }

  double cutoff(double t) const;      // g(t)
  double cutoff_deriv(double t) const;

 private:
  double radius_;
  double alpha_;
  double scale_;
};

// Calderon-Zygmund kernel variants sharing the size/gradient envelope
// |K(x)| <= C/|x|^s, |grad K(x)| <= C/|x|^(s+1):
//   - riesz: K(x) = x / |x|^(s+1), d components, treated componentwise;
//   - smooth-odd: the scalar bump itself;
//   - random-composite: K(x) = sum_{|n| <= n0} eps_n 3^-s 2^(-ns) phi(x/2^n)
//     with independent random signs eps_n.
class Kernel {
 public:
  enum class Type { riesz, smooth_odd, random_composite };

  static Kernel riesz(int d, double s);
  static Kernel smooth_odd(int d, double s, SmoothBump bump);
  static Kernel random_composite(int d, double s, SmoothBump base, int n0, uint64_t seed);

  Type type() const { return type_; }
  int dim() const { return d_; }
  double s() const { return s_; }
  int components() const { return type_ == Type::riesz ? d_ : 1; }
  int n0() const { return n0_; }
  const std::vector<int>& signs() const { return signs_; }  // for |n| <= n0, index n + n0

  // All components at x (x != 0 for riesz).
  Vec eval(const Eigen::Ref<const Vec>& x) const;

 private:
  Kernel(Type t, int d, double s) : type_(t), d_(d), s_(s) {}

  Type type_;
  int d_;
  double s_;
  std::vector<SmoothBump> bump_;  // empty for riesz
  int n0_ = 0;
  std::vector<int> signs_;
};

// Sampled size/gradient certificate: worst |K(x)|*|x|^s and
// |grad K(x)|*|x|^(s+1) over log-spaced radii and a deterministic direction
// set (gradient by central differences with step 1e-5 * |x|).
struct CzCertificate {
  double size_constant = 0.0;
  double gradient_constant = 0.0;
  double worst_radius = 0.0;  // where the size bound peaks
};

CzCertificate cz_certificate(const Kernel& k, double r_lo, double r_hi, int n_radii,
                             int n_directions, uint64_t seed);

// Family (phi_j): odd Lipschitz bumps with support radius j = 1..count,
// crossed with plateau fractions; ordered radius-major.
struct TestFunctionFamily {
  std::vector<SmoothBump> members;

  static TestFunctionFamily standard(int count, const std::vector<double>& alphas = {0.5});
};

// Kernel from a textual description: "riesz", "smooth:<R>", or
// "random:<R>,<n0>" (bump support radius R, plateau fraction 0.5).
Kernel parse_kernel(const std::string& text, int d, double s, uint64_t seed);

}  // namespace wolff
