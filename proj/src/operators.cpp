#include "wolff/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace wolff {

namespace {

constexpr Index kDenseCap = 2048;

}  // namespace

double dot_mu(const Measure& mu, const Vec& a, const Vec& b) {
  return (mu.weights().array() * a.array() * b.array()).sum();
}

double norm_mu(const Measure& mu, const Vec& a) { return std::sqrt(dot_mu(mu, a, a)); }

namespace {

// Truncated kernel action with an optional dense cache (one matrix per
// component).  Apply and adjoint are exact transposes of each other.
class TruncatedOperator {
 public:
  TruncatedOperator(const Kernel& k, const Measure& mu, double eps)
      : k_(k), mu_(mu), eps_(eps), dense_(mu.size() <= kDenseCap) {
    if (!(eps > 0.0)) fail_parameter("truncated operator: epsilon must be positive");
    const Index n = mu.size();
    if (dense_) {
      g_.assign(static_cast<size_t>(k.components()), Mat::Zero(n, n));
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          if (i == j) continue;
          Vec dx = mu.point(i) - mu.point(j);
          const double dist = dx.norm();
          if (dist < eps_ || dist == 0.0) continue;
          Vec val = k.eval(dx);
          for (int c = 0; c < k.components(); ++c) g_[static_cast<size_t>(c)](i, j) = val[c];
        }
      }
    }
  }

  // (components x n) <- f
  Mat apply(const Vec& f) const {
    const Index n = mu_.size();
    Mat out = Mat::Zero(k_.components(), n);
    const Vec wf = mu_.weights().cwiseProduct(f);
    if (dense_) {
      for (int c = 0; c < k_.components(); ++c)
        out.row(c) = (g_[static_cast<size_t>(c)] * wf).transpose();
      return out;
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        Vec dx = mu_.point(i) - mu_.point(j);
        const double dist = dx.norm();
        if (dist < eps_ || dist == 0.0) continue;
        out.col(i) += k_.eval(dx) * wf[j];
      }
    }
    return out;
  }

  // n-vector <- (components x n)
  Vec apply_adjoint(const Mat& g) const {
    const Index n = mu_.size();
    Vec out = Vec::Zero(n);
    if (dense_) {
      for (int c = 0; c < k_.components(); ++c) {
        const Vec wg = mu_.weights().cwiseProduct(g.row(c).transpose());
        out += g_[static_cast<size_t>(c)].transpose() * wg;
      }
      return out;
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        Vec dx = mu_.point(i) - mu_.point(j);
        const double dist = dx.norm();
        if (dist < eps_ || dist == 0.0) continue;
        const Vec val = k_.eval(dx);
        for (int c = 0; c < k_.components(); ++c) out[j] += val[c] * mu_.weight(i) * g(c, i);
      }
    }
    return out;
  }

 private:
  const Kernel& k_;
  const Measure& mu_;
  double eps_;
  bool dense_;
  std::vector<Mat> g_;
};

// Power iteration on T*T in the mu-weighted inner product starting from the
// unit vector f, which is overwritten with the final iterate.  Returns the
// final Rayleigh quotient (zero when the start vector dies in the kernel).
// Stops on a small Rayleigh residual, or on a stalled quotient: the Rayleigh
// quotient is nondecreasing under power iteration for a positive semidefinite
// operator, so a vanishing per-step gain signals convergence even when a tiny
// spectral gap keeps the residual criterion slow to reach.
double power_iterate(const TruncatedOperator& op, const Measure& mu, Vec& f, int max_iters,
                     double tol, NormEstimate& est) {
  double lambda = 0.0;
  int stalled = 0;
  for (int it = 0; it < max_iters; ++it) {
    const Mat g = op.apply(f);
    const Vec h = op.apply_adjoint(g);
    const double next = dot_mu(mu, h, f);  // = ||T f||^2 since ||f||_mu = 1
    est.iterations += 1;
    const double hn = norm_mu(mu, h);
    if (!(hn > 0.0)) return 0.0;
    est.residual = norm_mu(mu, h - next * f) / std::max(next, 1e-300);
    f = h / hn;
    stalled = (next - lambda <= 1e-13 * next) ? stalled + 1 : 0;
    lambda = next;
    if (est.residual < tol || stalled >= 3) break;
  }
  return lambda;
}

Vec random_start(const Measure& mu, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vec f(mu.size());
  for (Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
  return f;
}

// Shared driver: tries the warm-start vector first (when usable), then up to
// three seeded random restarts; restarts only matter when an iterate lands in
// the kernel of T*T.
NormEstimate estimate_norm(const TruncatedOperator& op, const Measure& mu, double epsilon,
                           int max_iters, double tol, uint64_t seed, Vec* warm) {
  NormEstimate est;
  est.epsilon = epsilon;
  const Index n = mu.size();
  if (n == 0) return est;
  if (max_iters < 1) fail_parameter("operator_norm: max_iters must be >= 1");

  const bool have_warm = warm != nullptr && warm->size() == n;
  for (int attempt = have_warm ? -1 : 0; attempt < 3; ++attempt) {
    Vec f = attempt < 0 ? *warm : random_start(mu, seed + static_cast<uint64_t>(attempt));
    const double f0n = norm_mu(mu, f);
    if (!(f0n > 0.0)) continue;
    f /= f0n;
    const double lambda = power_iterate(op, mu, f, max_iters, tol, est);
    if (lambda > 0.0) {
      est.norm = std::sqrt(lambda);
      if (warm != nullptr) *warm = f;
      return est;
    }
  }
  est.norm = 0.0;  // every restart landed in the kernel
  return est;
}

}  // namespace

Mat truncated_apply(const Kernel& k, const Measure& mu, const Vec& f, double epsilon) {
  if (f.size() != mu.size()) fail_parameter("truncated_apply: f size mismatch");
  return TruncatedOperator(k, mu, epsilon).apply(f);
}

NormEstimate operator_norm(const Kernel& k, const Measure& mu, double epsilon, int max_iters,
                           double tol, uint64_t seed) {
  TruncatedOperator op(k, mu, epsilon);
  return estimate_norm(op, mu, epsilon, max_iters, tol, seed, nullptr);
}

SupNormEstimate operator_norm_sup(const Kernel& k, const Measure& mu, int max_iters, double tol,
                                  uint64_t seed) {
  SupNormEstimate out;
  if (mu.size() < 2 || !mu.min_gap()) {
    out.best = NormEstimate{};
    return out;
  }
  const double r0 = mu.default_r_min();
  const double top = 2.0 * mu.diameter();
  // The dominant singular vector moves slowly along the truncation grid, so
  // each step is warm-started from the previous one.
  Vec warm;
  for (double eps = r0; eps <= top; eps *= 2.0) {
    TruncatedOperator op(k, mu, eps);
    out.grid.push_back(estimate_norm(op, mu, eps, max_iters, tol, seed, &warm));
    if (out.grid.back().norm > out.best.norm) out.best = out.grid.back();
  }
  return out;
}

Vec scaled_convolution(const SmoothBump& phi, const Measure& mu, const Vec& f, double s,
                       double ell) {
  if (f.size() != mu.size()) fail_parameter("scaled_convolution: f size mismatch");
  if (!(ell > 0.0)) fail_parameter("scaled_convolution: ell must be positive");
  const Index n = mu.size();
  const double pre = std::pow(ell, -s);
  Vec out = Vec::Zero(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      acc += phi(3.0 * (mu.point(i) - mu.point(j)) / ell) * f[j] * mu.weight(j);
    }
    out[i] = pre * acc;
  }
  return out;
}

double square_function(const SmoothBump& phi, const Measure& mu, const Vec& f, double s, int n_lo,
                       int n_hi) {
  if (n_lo > n_hi) fail_parameter("square_function: empty level range");
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(n_hi - n_lo + 1));
  for (int n = n_lo; n <= n_hi; ++n) {
    const Vec t = scaled_convolution(phi, mu, f, s, 3.0 * std::exp2(static_cast<double>(n)));
    terms.push_back(dot_mu(mu, t, t));
  }
  return pairwise_sum(terms);
}

std::pair<int, int> square_function_levels(const SmoothBump& phi, const Measure& mu) {
  auto gap = mu.min_gap();
  if (!gap) fail_domain("square_function_levels: need at least two distinct atoms");
  const int lo = static_cast<int>(std::floor(std::log2(*gap / phi.radius()))) - 1;
  const int hi = static_cast<int>(std::ceil(std::log2(std::max(mu.diameter(), 1e-300)))) + 12;
  return {lo, hi};
}

}  // namespace wolff
