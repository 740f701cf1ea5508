#include "wolff/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wolff {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kZeroTol = 1e-12;
constexpr int kDegenerateRun = 100;
constexpr long kMaxIterations = 200000;

struct Tableau {
  Mat t;                    // rows: constraints, then objective; last col: rhs
  std::vector<int> basis;   // basic variable of each constraint row
  int rows = 0;             // constraint rows
  int cols = 0;             // variable columns (excludes rhs)
  int n_struct = 0;         // structural variables
  int art_begin = 0;        // first artificial column
  long iterations = 0;
  int degenerate_run = 0;
  bool bland = false;

  double& rhs(int r) { return t(r, cols); }
  double& obj(int c) { return t(rows, c); }

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (int i = 0; i <= rows; ++i) {
      if (i == r) continue;
      double f = t(i, c);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[static_cast<size_t>(r)] = c;
  }

  // Returns std::nullopt-like -1 when optimal; -2 when unbounded.
  int step(const std::vector<char>& allowed) {
    int enter = -1;
    if (!bland) {
      double best = -kPivotTol;
      for (int c = 0; c < cols; ++c) {
        if (allowed[static_cast<size_t>(c)] && t(rows, c) < best) {
          best = t(rows, c);
          enter = c;
        }
      }
    } else {
      for (int c = 0; c < cols; ++c) {
        if (allowed[static_cast<size_t>(c)] && t(rows, c) < -kPivotTol) {
          enter = c;
          break;
        }
      }
    }
    if (enter < 0) return -1;

    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < rows; ++r) {
      double a = t(r, enter);
      if (a > kPivotTol) {
        double ratio = rhs(r) / a;
        if (leave < 0 || ratio < best_ratio - kZeroTol ||
            (ratio < best_ratio + kZeroTol &&
             basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return -2;

    degenerate_run = best_ratio < kZeroTol ? degenerate_run + 1 : 0;
    if (degenerate_run > kDegenerateRun) bland = true;
    pivot(leave, enter);
    ++iterations;
    if (iterations > kMaxIterations) fail_numeric("simplex: iteration cap exceeded");
    return enter;
  }

  void run(const std::vector<char>& allowed, bool* unbounded = nullptr) {
    if (unbounded) *unbounded = false;
    while (true) {
      int r = step(allowed);
      if (r == -1) return;
      if (r == -2) {
        if (unbounded) {
          *unbounded = true;
          return;
        }
        fail_numeric("simplex: unexpected unbounded phase");
      }
    }
  }
};

}  // namespace

LpResult solve_lp_max(const Vec& c, const Mat& A_ub, const Vec& b_ub, const Mat& A_eq,
                      const Vec& b_eq) {
  const int n = static_cast<int>(c.size());
  const int m_ub = static_cast<int>(A_ub.rows());
  const int m_eq = static_cast<int>(A_eq.rows());
  if (A_ub.rows() != b_ub.size() || A_eq.rows() != b_eq.size() ||
      (m_ub > 0 && A_ub.cols() != n) || (m_eq > 0 && A_eq.cols() != n))
    fail_parameter("solve_lp_max: inconsistent shapes");

  const int m = m_ub + m_eq;
  // Column layout: structural | slack (ub rows) | artificial (eq rows and
  // ub rows with negative rhs).
  std::vector<int> art_of_row(static_cast<size_t>(m), -1);
  int n_art = m_eq;
  for (int r = 0; r < m_ub; ++r) {
    if (b_ub[r] < 0.0) ++n_art;
  }

  Tableau tab;
  tab.rows = m;
  tab.n_struct = n;
  tab.art_begin = n + m_ub;
  tab.cols = n + m_ub + n_art;
  tab.t = Mat::Zero(m + 1, tab.cols + 1);
  tab.basis.assign(static_cast<size_t>(m), -1);

  int next_art = tab.art_begin;
  for (int r = 0; r < m_ub; ++r) {
    double scale = std::max(A_ub.row(r).cwiseAbs().maxCoeff(), std::abs(b_ub[r]));
    if (!(scale > 0.0)) scale = 1.0;
    double sign = b_ub[r] < 0.0 ? -1.0 : 1.0;  // normalize rhs >= 0
    tab.t.block(r, 0, 1, n) = sign * A_ub.row(r) / scale;
    tab.rhs(r) = sign * b_ub[r] / scale;
    tab.t(r, n + r) = sign;  // slack (surplus when flipped)
    if (sign < 0.0) {
      tab.t(r, next_art) = 1.0;
      art_of_row[static_cast<size_t>(r)] = next_art;
      tab.basis[static_cast<size_t>(r)] = next_art++;
    } else {
      tab.basis[static_cast<size_t>(r)] = n + r;
    }
  }
  for (int r = 0; r < m_eq; ++r) {
    int row = m_ub + r;
    double scale = std::max(A_eq.row(r).cwiseAbs().maxCoeff(), std::abs(b_eq[r]));
    if (!(scale > 0.0)) scale = 1.0;
    double sign = b_eq[r] < 0.0 ? -1.0 : 1.0;
    tab.t.block(row, 0, 1, n) = sign * A_eq.row(r) / scale;
    tab.rhs(row) = sign * b_eq[r] / scale;
    tab.t(row, next_art) = 1.0;
    art_of_row[static_cast<size_t>(row)] = next_art;
    tab.basis[static_cast<size_t>(row)] = next_art++;
  }

  LpResult res;

  // Phase 1: maximize -sum(artificials).
  if (n_art > 0) {
    for (int col = tab.art_begin; col < tab.cols; ++col) tab.obj(col) = 1.0;
    for (int r = 0; r < m; ++r) {
      if (tab.basis[static_cast<size_t>(r)] >= tab.art_begin) tab.t.row(m) -= tab.t.row(r);
    }
    std::vector<char> allowed(static_cast<size_t>(tab.cols), 1);
    tab.run(allowed);
    if (tab.t(m, tab.cols) < -1e-8) {
      res.status = LpStatus::infeasible;
      return res;
    }
    // Drive remaining basic artificials out (degenerate rows).
    for (int r = 0; r < m; ++r) {
      if (tab.basis[static_cast<size_t>(r)] < tab.art_begin) continue;
      int col = -1;
      for (int j = 0; j < tab.art_begin; ++j) {
        if (std::abs(tab.t(r, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(r, col);
      } else {
        tab.t.row(r).setZero();  // redundant constraint
      }
    }
  }

  // Phase 2: real objective; artificial columns are frozen.
  tab.t.row(m).setZero();
  tab.t.block(m, 0, 1, n) = -c.transpose();
  for (int r = 0; r < m; ++r) {
    int b = tab.basis[static_cast<size_t>(r)];
    if (b < tab.cols && tab.t(m, b) != 0.0) tab.t.row(m) -= tab.t(m, b) * tab.t.row(r);
  }
  std::vector<char> allowed(static_cast<size_t>(tab.cols), 1);
  for (int col = tab.art_begin; col < tab.cols; ++col) allowed[static_cast<size_t>(col)] = 0;
  bool unbounded = false;
  tab.degenerate_run = 0;
  tab.bland = false;
  tab.run(allowed, &unbounded);
  if (unbounded) {
    res.status = LpStatus::unbounded;
    return res;
  }

  res.x = Vec::Zero(n);
  for (int r = 0; r < m; ++r) {
    int b = tab.basis[static_cast<size_t>(r)];
    if (b >= 0 && b < n) res.x[b] = tab.rhs(r);
  }
  res.value = c.dot(res.x);
  return res;
}

}  // namespace wolff
