#pragma once

#include "wolff/kernels.hpp"
#include "wolff/measure.hpp"
#include "wolff/types.hpp"

#include <cstdint>
#include <vector>

namespace wolff {

// Weighted inner product and norm on L^2(mu) restricted to the atoms.
double dot_mu(const Measure& mu, const Vec& a, const Vec& b);
double norm_mu(const Measure& mu, const Vec& a);

// Truncated singular integral at the atoms:
//   (components x n),  out(c, i) = sum_{|x_i - x_j| >= eps} K_c(x_i - x_j) f_j w_j.
Mat truncated_apply(const Kernel& k, const Measure& mu, const Vec& f, double epsilon);

struct NormEstimate {
  double norm = 0.0;
  double residual = 0.0;  // Rayleigh residual of the final iterate
  int iterations = 0;
  double epsilon = 0.0;
};

// Largest singular value of the truncated operator on L^2(mu) via power
// iteration on T*T in the mu-weighted inner product (seeded start vector,
// stop on Rayleigh residual < tol or after max_iters).
NormEstimate operator_norm(const Kernel& k, const Measure& mu, double epsilon,
                           int max_iters = 200, double tol = 1e-8, uint64_t seed = 1);

// Max over the truncation grid eps = r_min * 2^j, j >= 0, up to the support
// diameter (r_min defaults to half the smallest atom gap, so the first grid
// point keeps every pair).
struct SupNormEstimate {
  NormEstimate best;
  std::vector<NormEstimate> grid;
};
SupNormEstimate operator_norm_sup(const Kernel& k, const Measure& mu, int max_iters = 200,
                                  double tol = 1e-8, uint64_t seed = 1);

// Scale-adapted smooth convolution T_{phi, ell}(f mu) at the atoms:
//   out(i) = ell^-s sum_j phi(3 (x_i - x_j) / ell) f_j w_j.
Vec scaled_convolution(const SmoothBump& phi, const Measure& mu, const Vec& f, double s,
                       double ell);

// Square function: sum over n in [n_lo, n_hi] of
//   || T_{phi, 3*2^n}(f mu) ||^2_mu.
double square_function(const SmoothBump& phi, const Measure& mu, const Vec& f, double s, int n_lo,
                       int n_hi);

// Level range outside which T_{phi, 3*2^n}(f mu) vanishes identically for
// this measure: 3*2^n spans [min gap / phi.radius, diameter * 3 / phi...]
// computed from the atom geometry (inclusive, slightly padded).
std::pair<int, int> square_function_levels(const SmoothBump& phi, const Measure& mu);

}  // namespace wolff
