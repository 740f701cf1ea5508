#include "wolff/selection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wolff {

namespace {

constexpr int kMaxLevel = 40;

long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

// Highest level at which any cube could still dominate a cube of level m and
// density dens: even a triple carrying the whole measure has density
// W * (3*2^m')^(-s), and domination needs that to beat 2^(eps*(m'-m))*dens.
int sound_level_cap(double total_mass, double dens, int m, double s, double eps) {
  double cap = (std::log2(total_mass / dens) - s * std::log2(3.0) + eps * m) / (s + eps);
  if (!std::isfinite(cap)) return kMaxLevel;
  return static_cast<int>(std::min<double>(kMaxLevel, std::floor(cap)));
}

}  // namespace

bool dominates_above(const Measure& mu, const Cube& outer, const Cube& q, double s, double eps) {
  if (outer == q) return false;
  if (!cube_contains(outer, q)) return false;
  const double gap = ratio(outer, q);
  return density(mu, outer, s) >= std::exp2(eps * gap) * density(mu, q, s);
}

SelectionResult select_upward(const Measure& mu, const LatticeView& view,
                              const SelectionOptions& opts) {
  const size_t n = view.cubes.size();
  SelectionResult res;
  res.mass.resize(n);
  res.density.resize(n);
  res.selected.assign(n, 1);
  res.certificate.assign(n, -1);
  res.search_truncated.assign(n, 0);

  for (size_t i = 0; i < n; ++i) {
    res.mass[i] = mass_cube(mu, view.cubes[i]);
    res.density[i] = res.mass[i] / std::pow(view.cubes[i].side(), opts.s);
  }

  const double W = mu.total_mass();
  for (size_t qi = 0; qi < n; ++qi) {
    const Cube& q = view.cubes[qi];
    const double dens = res.density[qi];
    if (!(dens > 0.0)) continue;  // nothing can dominate a zero-density cube

    const int cap = sound_level_cap(W, dens, q.level, opts.s, opts.eps);
    if (cap > view.m_max) {
      res.search_truncated[qi] = 1;
      res.complete = false;
    }
    const int d = q.dim();
    int found = -1;
    for (int m = std::min(cap, view.m_max); m > q.level && found < 0; --m) {
      const long long g = 1LL << (m - q.level);
      // Corner ranges solving (k'-1)*2^m <= (k-1)*2^q.level and
      // (k+2)*2^q.level <= (k'+2)*2^m per axis.
      std::vector<long long> lo(static_cast<size_t>(d)), hi(static_cast<size_t>(d));
      for (int a = 0; a < d; ++a) {
        const long long k = q.corner[static_cast<size_t>(a)];
        lo[static_cast<size_t>(a)] = ceil_div(k + 2, g) - 2;
        hi[static_cast<size_t>(a)] = floor_div(k - 1, g) + 1;
      }
      std::vector<long long> cur(lo);
      bool more = true;
      while (more && found < 0) {
        Cube cand(m, cur);
        if (cube_contains(cand, q) && cand != q) {
          double cd;
          if (auto vi = view.find(cand)) {
            cd = res.density[*vi];
          } else {
            cd = density(mu, cand, opts.s);  // view was spatially restricted
          }
          if (cd >= std::exp2(opts.eps * (m - q.level)) * dens) {
            found = static_cast<int>(view.find(cand).value_or(n));
            // Certificates refer to view cubes; a restricted view may lack
            // the dominator, in which case the cube is still rejected.
            res.selected[qi] = 0;
            res.certificate[qi] = found < static_cast<int>(n) ? found : -1;
          }
        }
        // lexicographic increment, axis 0 most significant
        int a = d - 1;
        for (; a >= 0; --a) {
          if (++cur[static_cast<size_t>(a)] <= hi[static_cast<size_t>(a)]) break;
          cur[static_cast<size_t>(a)] = lo[static_cast<size_t>(a)];
        }
        if (a < 0) more = false;
      }
    }
  }

  std::vector<double> all_terms(n), sel_terms;
  sel_terms.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    all_terms[i] = res.density[i] * res.density[i] * res.mass[i];
    if (res.selected[i]) sel_terms.push_back(all_terms[i]);
  }
  res.energy_total = pairwise_sum(all_terms);
  res.energy_selected = pairwise_sum(sel_terms);
  return res;
}

double doubling_check(const Measure& mu, const Cube& q, double M, double s, double eps) {
  if (!(M > 0.0)) fail_parameter("doubling_check: M must be positive");
  const double base = mass_cube(mu, q);
  if (!(base > 0.0)) fail_domain("doubling_check: cube carries no mass");
  return mu.mass_box(q.dilated(M)) / (std::pow(M, s + eps) * base);
}

namespace {

struct Candidate {
  size_t view_index;
  double value;  // contribution to the mass condition
  Box tripled;
};

bool conflict(const Candidate& a, const Candidate& b) { return !a.tripled.disjoint(b.tripled); }

// Exhaustive max-value pairwise-disjoint subset (candidate count <= 20).
void exact_search(const std::vector<Candidate>& cands, const std::vector<uint32_t>& conf,
                  const std::vector<double>& suffix, size_t idx, uint32_t mask, double sum,
                  std::vector<size_t>& cur, double& best_sum, std::vector<size_t>& best_set) {
  if (sum > best_sum) {
    best_sum = sum;
    best_set = cur;
  }
  if (idx == cands.size() || sum + suffix[idx] <= best_sum) return;
  if (!(mask & conf[idx])) {
    cur.push_back(idx);
    exact_search(cands, conf, suffix, idx + 1, mask | (uint32_t(1) << idx),
                 sum + cands[idx].value, cur, best_sum, best_set);
    cur.pop_back();
  }
  exact_search(cands, conf, suffix, idx + 1, mask, sum, cur, best_sum, best_set);
}

}  // namespace

BunchSearch find_bunch(const Measure& mu, const LatticeView& view, const SelectionResult& upward,
                       size_t target, const SelectionOptions& opts) {
  (void)mu;
  if (target >= view.cubes.size()) fail_parameter("find_bunch: target out of range");
  const Cube& q = view.cubes[target];
  const Box big = q.dilated(3.0);
  const double dens = upward.density[target];
  const double need = dens * dens * upward.mass[target];

  std::vector<Candidate> cands;
  for (size_t j = 0; j < view.cubes.size(); ++j) {
    if (!upward.selected[j] || j == target) continue;
    const Cube& c = view.cubes[j];
    if (c.level > q.level) continue;
    Box t = c.dilated(3.0);
    if (!big.contains_box(t)) continue;
    const double gap = static_cast<double>(q.level - c.level);
    if (upward.density[j] < std::exp2(opts.eps * gap) * dens) continue;
    const double value =
        upward.density[j] * upward.density[j] * std::exp2(-2.0 * opts.eps * gap) * upward.mass[j];
    if (!(value > 0.0)) continue;
    cands.push_back({j, value, std::move(t)});
  }
  if (cands.size() > opts.candidate_cap)
    fail_capacity("find_bunch: candidate count " + std::to_string(cands.size()) +
                  " exceeds the configured cap");

  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.view_index < b.view_index;
  });

  BunchSearch out;
  out.candidates = cands.size();
  std::vector<size_t> picked;
  double picked_sum = 0.0;

  if (cands.size() <= std::min<size_t>(opts.exact_threshold, 31)) {
    std::vector<uint32_t> conf(cands.size(), 0);
    for (size_t i = 0; i < cands.size(); ++i) {
      for (size_t j = 0; j < cands.size(); ++j) {
        if (i != j && conflict(cands[i], cands[j])) conf[i] |= uint32_t(1) << j;
      }
    }
    std::vector<double> suffix(cands.size() + 1, 0.0);
    for (size_t i = cands.size(); i-- > 0;) suffix[i] = suffix[i + 1] + cands[i].value;
    std::vector<size_t> cur;
    exact_search(cands, conf, suffix, 0, 0, 0.0, cur, picked_sum, picked);
  } else {
    out.exact = false;
    std::vector<char> chosen(cands.size(), 0);
    auto fill_greedy = [&]() {
      for (size_t i = 0; i < cands.size(); ++i) {
        if (chosen[i]) continue;
        bool ok = true;
        for (size_t j = 0; j < cands.size() && ok; ++j) {
          if (chosen[j] && conflict(cands[i], cands[j])) ok = false;
        }
        if (ok) chosen[i] = 1;
      }
    };
    fill_greedy();
    auto total = [&]() {
      double t = 0.0;
      for (size_t i = 0; i < cands.size(); ++i) {
        if (chosen[i]) t += cands[i].value;
      }
      return t;
    };
    double sum = total();
    for (int round = 0; round < 200 && sum < need; ++round) {
      bool improved = false;
      for (size_t e = 0; e < cands.size() && !improved; ++e) {
        if (chosen[e]) continue;
        double displaced = 0.0;
        for (size_t j = 0; j < cands.size(); ++j) {
          if (chosen[j] && conflict(cands[e], cands[j])) displaced += cands[j].value;
        }
        if (cands[e].value > displaced) {
          for (size_t j = 0; j < cands.size(); ++j) {
            if (chosen[j] && conflict(cands[e], cands[j])) chosen[j] = 0;
          }
          chosen[e] = 1;
          fill_greedy();
          sum = total();
          improved = true;
        }
      }
      if (!improved) break;
    }
    for (size_t i = 0; i < cands.size(); ++i) {
      if (chosen[i]) picked.push_back(i);
    }
    picked_sum = sum;
  }

  if (picked_sum >= need && !picked.empty()) {
    Bunch b;
    b.target = target;
    b.lhs = picked_sum;
    b.rhs = need;
    for (size_t i : picked) b.members.push_back(cands[i].view_index);
    std::sort(b.members.begin(), b.members.end());
    out.bunch = std::move(b);
  }
  return out;
}

DownwardResult select_downward(const Measure& mu, const LatticeView& view,
                               const SelectionResult& upward, const SelectionOptions& opts) {
  const size_t n = view.cubes.size();
  DownwardResult res;
  res.selected.assign(n, 0);
  res.bunch.resize(n);
  res.uncertified.assign(n, 0);

  std::vector<double> total_terms, sel_terms;
  for (size_t i = 0; i < n; ++i) {
    if (!upward.selected[i]) continue;
    const double term = upward.density[i] * upward.density[i] * upward.mass[i];
    total_terms.push_back(term);
    BunchSearch search = find_bunch(mu, view, upward, i, opts);
    if (search.bunch) {
      res.bunch[i] = std::move(search.bunch);
      if (!search.exact) res.exact = false;
    } else {
      res.selected[i] = 1;
      sel_terms.push_back(term);
      if (!search.exact) {
        res.uncertified[i] = 1;  // greedy found nothing; not a proof
        res.exact = false;
      }
    }
  }
  res.energy_total = pairwise_sum(total_terms);
  res.energy_selected = pairwise_sum(sel_terms);
  return res;
}

}  // namespace wolff
