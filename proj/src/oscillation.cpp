#include "wolff/oscillation.hpp"

#include "wolff/operators.hpp"
#include "wolff/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace wolff {

namespace {

double support_diameter(const Box& b) {
  double acc = 0.0;
  for (int a = 0; a < b.lo.size(); ++a) acc += b.side(a) * b.side(a);
  return std::sqrt(acc);
}

}  // namespace

std::optional<std::string> lip_violation(const Measure& mu, const LipFunction& psi, double tol) {
  const Index n = static_cast<Index>(psi.nodes.size());
  if (psi.values.size() != n) return "values/nodes size mismatch";
  if (!(psi.lip_bound >= 0.0)) return "negative Lipschitz bound";
  const double scale = std::max(1.0, psi.lip_bound * support_diameter(psi.support));
  const double slack = tol * scale;

  double mean = 0.0;
  double node_mass = 0.0;
  for (Index a = 0; a < n; ++a) {
    const Index i = psi.nodes[static_cast<size_t>(a)];
    if (i < 0 || i >= mu.size()) return "node index out of range";
    const Vec x = mu.point(i);
    if (!psi.support.contains(x)) return "node outside the support box";
    const double cap = psi.lip_bound * psi.support.min_face_distance(x);
    if (std::abs(psi.values[a]) > cap + slack) {
      std::ostringstream os;
      os << "boundary cap violated at node " << a << ": |" << psi.values[a] << "| > " << cap;
      return os.str();
    }
    mean += mu.weight(i) * psi.values[a];
    node_mass += mu.weight(i);
  }
  if (std::abs(mean) > slack * std::max(node_mass, 1.0)) {
    std::ostringstream os;
    os << "mean-zero violated: integral = " << mean;
    return os.str();
  }
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      const double dist =
          (mu.point(psi.nodes[static_cast<size_t>(a)]) - mu.point(psi.nodes[static_cast<size_t>(b)]))
              .norm();
      const double gap = std::abs(psi.values[a] - psi.values[b]);
      if (gap > psi.lip_bound * dist + slack) {
        std::ostringstream os;
        os << "Lipschitz bound violated between nodes " << a << " and " << b << ": " << gap
           << " > " << psi.lip_bound * dist;
        return os.str();
      }
    }
  }
  return std::nullopt;
}

namespace {

// Pairing vector t at the node atoms: the convolution of mu with phi at
// scale ell, optionally premultiplied by ell^-s.
Vec pairing_at_nodes(const Measure& mu, const std::vector<Index>& nodes, const SmoothBump& phi,
                     double s, double ell, bool scaled) {
  const double pre = scaled ? std::pow(ell, -s) : 1.0;
  Vec t = Vec::Zero(static_cast<Index>(nodes.size()));
  for (size_t a = 0; a < nodes.size(); ++a) {
    const Vec x = mu.point(nodes[a]);
    double acc = 0.0;
    for (Index j = 0; j < mu.size(); ++j) {
      acc += (scaled ? phi(3.0 * (x - mu.point(j)) / ell) : phi(x - mu.point(j))) * mu.weight(j);
    }
    t[static_cast<Index>(a)] = pre * acc;
  }
  return t;
}

struct LpPieces {
  Vec c;        // objective over the shifted variable y = v + cap
  Mat a_ub;     // box rows plus accumulated pairwise rows
  Vec b_ub;
  Mat a_eq;     // single mean-value row
  Vec b_eq;
  double shift_term = 0.0;  // c . cap, subtracted to recover the objective in v
};

}  // namespace

ThetaResult theta(const Measure& mu, const Cube& q, const SmoothBump& phi, double A, double s,
                  const ThetaOptions& opts) {
  if (!(A > 1.0)) fail_parameter("theta: dilation factor A must exceed 1");
  if (!(s > 0.0)) fail_parameter("theta: s must be positive");
  const Box home = q.dilated(A);
  std::vector<Index> nodes = mu.atoms_in_box(home);
  if (nodes.empty()) fail_domain("theta: no atoms of the measure lie in the dilated cube");

  ThetaResult result;
  if (static_cast<Index>(nodes.size()) > opts.node_cap) {
    // Deterministic stride subsample in canonical atom order.
    const size_t stride = (nodes.size() + static_cast<size_t>(opts.node_cap) - 1) /
                          static_cast<size_t>(opts.node_cap);
    std::vector<Index> kept;
    for (size_t a = 0; a < nodes.size(); a += stride) kept.push_back(nodes[a]);
    nodes = std::move(kept);
    result.subsampled = true;
  }
  const Index n = static_cast<Index>(nodes.size());
  result.n_nodes = n;

  const double ell = q.side();
  const double lip = 1.0 / ell;
  const Vec t = pairing_at_nodes(mu, nodes, phi, s, ell, opts.scaled_pairing);

  Vec w(n), cap(n);
  Mat pts(mu.dim(), n);
  for (Index a = 0; a < n; ++a) {
    const Index i = nodes[static_cast<size_t>(a)];
    w[a] = mu.weight(i);
    pts.col(a) = mu.point(i);
    cap[a] = lip * home.min_face_distance(pts.col(a));
  }
  Mat dist(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) dist(a, b) = (pts.col(a) - pts.col(b)).norm();

  const double objective_scale = std::max(1.0, t.cwiseAbs().maxCoeff() * w.sum());
  const double cut_slack = opts.cut_tol * std::max(1.0, cap.maxCoeff());

  // Shifted variable y = v + cap lives in [0, 2 cap]; a pairwise increment
  // bound |v_a - v_b| <= lip d(a,b) becomes two one-sided rows with
  // nonnegative right-hand sides because cap itself is lip-Lipschitz.
  double best_value = -1.0;
  Vec best_v;
  double best_raw = 0.0;
  int rounds_used = 0;

  for (int sign = 0; sign < 2; ++sign) {
    const double sigma = sign == 0 ? 1.0 : -1.0;
    Vec c = (sigma * t.array() * w.array()).matrix();
    const double shift_term = c.dot(cap);

    std::vector<std::pair<Index, Index>> rows;  // directed pairs (a, b)
    Vec y;
    double raw_value = 0.0;
    for (int round = 0;; ++round) {
      if (round >= opts.max_rounds)
        fail_numeric("theta: constraint generation did not converge");
      rounds_used = std::max(rounds_used, round + 1);
      const Index m = n + static_cast<Index>(rows.size());
      Mat a_ub = Mat::Zero(m, n);
      Vec b_ub(m);
      for (Index a = 0; a < n; ++a) {
        a_ub(a, a) = 1.0;
        b_ub[a] = 2.0 * cap[a];
      }
      for (size_t r = 0; r < rows.size(); ++r) {
        const auto [a, b] = rows[r];
        const Index row = n + static_cast<Index>(r);
        a_ub(row, a) = 1.0;
        a_ub(row, b) = -1.0;
        b_ub[row] = lip * dist(a, b) + cap[a] - cap[b];
      }
      Mat a_eq = w.transpose();
      Vec b_eq(1);
      b_eq[0] = w.dot(cap);

      const LpResult lp = solve_lp_max(c, a_ub, b_ub, a_eq, b_eq);
      if (lp.status != LpStatus::optimal)
        fail_numeric("theta: inner linear program failed to solve");
      y = lp.x;
      raw_value = lp.value - shift_term;

      // Collect the worst violated pairwise rows and iterate.
      std::vector<std::pair<double, std::pair<Index, Index>>> violated;
      for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
          if (a == b) continue;
          const double excess = (y[a] - y[b]) - (lip * dist(a, b) + cap[a] - cap[b]);
          if (excess > cut_slack) violated.push_back({excess, {a, b}});
        }
      }
      if (violated.empty()) break;
      // At a vertex only ~n constraints bind, so drop rows with real slack
      // before adding new cuts; late rounds accumulate instead, which makes
      // convergence certain because the finite row set then grows strictly.
      if (round < opts.max_rounds / 2) {
        const double keep_slack = 1e-6 * std::max(1.0, cap.maxCoeff());
        std::vector<std::pair<Index, Index>> kept;
        kept.reserve(rows.size());
        for (const auto& [a, b] : rows) {
          if ((lip * dist(a, b) + cap[a] - cap[b]) - (y[a] - y[b]) <= keep_slack)
            kept.push_back({a, b});
        }
        rows.swap(kept);
      }
      std::sort(violated.begin(), violated.end(),
                [](const auto& lhs, const auto& rhs) { return lhs.first > rhs.first; });
      const size_t take = std::min<size_t>(violated.size(), static_cast<size_t>(2 * n));
      for (size_t r = 0; r < take; ++r) rows.push_back(violated[r].second);
    }

    Vec v = y - cap;
    // Certify the witness: restore mean zero exactly, merge values at
    // coincident atoms, then scale into the feasible set.
    v.array() -= w.dot(v) / w.sum();
    for (Index a = 0; a < n; ++a) {
      for (Index b = a + 1; b < n; ++b) {
        if (dist(a, b) == 0.0 && v[a] != v[b]) v[a] = v[b] = 0.5 * (v[a] + v[b]);
      }
    }
    double rho = 1.0;
    for (Index a = 0; a < n; ++a) {
      if (cap[a] > 0.0)
        rho = std::max(rho, std::abs(v[a]) / cap[a]);
      else if (v[a] != 0.0)
        rho = std::numeric_limits<double>::infinity();
      for (Index b = a + 1; b < n; ++b) {
        const double bound = lip * dist(a, b);
        if (bound > 0.0) rho = std::max(rho, std::abs(v[a] - v[b]) / bound);
      }
    }
    if (!std::isfinite(rho)) {
      v.setZero();
    } else if (rho > 1.0) {
      v /= rho * (1.0 + 1e-12);
    }

    const double certified = std::abs((t.array() * v.array() * w.array()).sum());
    if (certified > best_value) {
      best_value = certified;
      best_v = v;
      best_raw = std::abs(raw_value);
    }
  }

  result.value = best_value;
  result.lp_residual = std::abs(best_raw - best_value) / std::max({best_value, objective_scale * 1e-14, 1e-300});
  result.rounds = rounds_used;
  result.witness.nodes = nodes;
  result.witness.values = best_v;
  result.witness.lip_bound = lip;
  result.witness.support = home;
  return result;
}

double riesz_system_test(const Measure& mu, const std::vector<CubePsi>& system, double A,
                         const Vec& g, double tol) {
  if (!(A > 1.0)) fail_parameter("riesz_system_test: dilation factor A must exceed 1");
  if (g.size() != mu.size()) fail_parameter("riesz_system_test: g size mismatch");
  const double gg = dot_mu(mu, g, g);
  if (!(gg > 0.0)) fail_parameter("riesz_system_test: g vanishes in L2(mu)");

  std::vector<double> terms;
  terms.reserve(system.size());
  for (const auto& entry : system) {
    const Box home = entry.cube.dilated(A);
    const LipFunction& psi = entry.psi;
    const double lip_cap = (1.0 / entry.cube.side()) * (1.0 + 1e-9);
    if (psi.lip_bound > lip_cap)
      fail_domain("riesz_system_test: Lipschitz bound too large for cube " +
                  format_cube(entry.cube));
    if ((psi.support.lo - home.lo).cwiseAbs().maxCoeff() > 1e-12 * entry.cube.side() ||
        (psi.support.hi - home.hi).cwiseAbs().maxCoeff() > 1e-12 * entry.cube.side())
      fail_domain("riesz_system_test: support box mismatch for cube " + format_cube(entry.cube));
    if (auto why = lip_violation(mu, psi, tol))
      fail_domain("riesz_system_test: invalid bump for cube " + format_cube(entry.cube) + ": " +
                  *why);

    double pairing = 0.0;
    for (size_t a = 0; a < psi.nodes.size(); ++a) {
      const Index i = psi.nodes[a];
      pairing += g[i] * psi.values[static_cast<Index>(a)] * mu.weight(i);
    }
    const double denom = mu.mass_box(entry.cube.dilated(3.0 * A));
    if (!(denom > 0.0))
      fail_domain("riesz_system_test: massless dilate for cube " + format_cube(entry.cube));
    terms.push_back(pairing * pairing / denom);
  }
  return pairwise_sum(terms) / gg;
}

GoalAReport goal_A_test(const Measure& mu, const std::vector<Cube>& selected,
                        const TestFunctionFamily& family, double A, double delta, double s,
                        const ThetaOptions& opts) {
  if (family.members.empty()) fail_parameter("goal_A_test: empty test family");
  GoalAReport report;
  report.delta = delta;
  report.min_ratio = std::numeric_limits<double>::infinity();
  for (const Cube& q : selected) {
    GoalARow row;
    row.cube = q;
    const double mass = mass_cube(mu, q);
    row.denom = density(mu, q, s) * mass;
    for (size_t j = 0; j < family.members.size(); ++j) {
      const ThetaResult r = theta(mu, q, family.members[j], A, s, opts);
      if (r.value > row.theta || row.best_phi < 0) {
        row.theta = r.value;
        row.best_phi = static_cast<int>(j);
        row.lp_residual = r.lp_residual;
        row.n_nodes = r.n_nodes;
      }
    }
    row.ratio = row.denom > 0.0 ? row.theta / row.denom : 0.0;
    report.min_ratio = std::min(report.min_ratio, row.ratio);
    report.rows.push_back(std::move(row));
  }
  if (report.rows.empty()) report.min_ratio = 0.0;
  report.pass = !report.rows.empty() && report.min_ratio >= delta;
  return report;
}

}  // namespace wolff
