#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "afplab/errors.hpp"

namespace afplab {

// ---------------------------------------------------------------------------
// Small dense two-phase primal simplex solver, enough for the minimax
// displacement LPs (a few hundred rows/columns). Variables are nonnegative;
// rows may be <=, >= or =. Bland's rule guards against cycling.
// ---------------------------------------------------------------------------

enum class LpRelation { LessEqual, Equal, GreaterEqual };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // sparse (var index, value)
  LpRelation rel = LpRelation::LessEqual;
  double rhs = 0;
};

struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;  // minimize c.x
  std::vector<LpRow> rows;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0;
  std::vector<double> x;
};

class SimplexSolver {
 public:
  explicit SimplexSolver(double eps = 1e-9, long long max_iters = 2'000'000)
      : eps_(eps), max_iters_(max_iters) {}

  LpSolution solve(const LpProblem& lp) {
    const int n = lp.num_vars;
    const int m = static_cast<int>(lp.rows.size());

    // Columns: structural (n), then one slack/surplus per inequality row,
    // then one artificial per row needing it.
    int n_slack = 0;
    for (const auto& r : lp.rows)
      if (r.rel != LpRelation::Equal) ++n_slack;

    std::vector<std::vector<double>> A(m);
    std::vector<double> b(m);
    std::vector<int> basis(m, -1);
    int total = n + n_slack;  // artificials appended below

    int slack_at = n;
    std::vector<int> slack_col(m, -1);
    for (int i = 0; i < m; ++i)
      if (lp.rows[i].rel != LpRelation::Equal) slack_col[i] = slack_at++;

    std::vector<int> art_col(m, -1);
    for (int i = 0; i < m; ++i) {
      const auto& r = lp.rows[i];
      double sign = r.rhs < 0 ? -1.0 : 1.0;  // normalize rhs >= 0
      A[i].assign(total, 0.0);
      for (auto [j, v] : r.coeffs) {
        if (j < 0 || j >= n) throw domain_error("LP coefficient out of range");
        A[i][j] += sign * v;
      }
      b[i] = sign * r.rhs;
      LpRelation rel = r.rel;
      if (sign < 0) {
        if (rel == LpRelation::LessEqual)
          rel = LpRelation::GreaterEqual;
        else if (rel == LpRelation::GreaterEqual)
          rel = LpRelation::LessEqual;
      }
      if (slack_col[i] >= 0)
        A[i][slack_col[i]] = (rel == LpRelation::LessEqual) ? 1.0 : -1.0;
      // a slack with +1 coefficient can start in the basis; others need an
      // artificial
      if (slack_col[i] >= 0 && rel == LpRelation::LessEqual) {
        basis[i] = slack_col[i];
      } else {
        art_col[i] = -2;  // mark: artificial needed
      }
    }
    int n_art = 0;
    for (int i = 0; i < m; ++i)
      if (art_col[i] == -2) art_col[i] = total + n_art++;
    for (int i = 0; i < m; ++i) {
      A[i].resize(total + n_art, 0.0);
      if (art_col[i] >= 0) {
        A[i][art_col[i]] = 1.0;
        basis[i] = art_col[i];
      }
    }
    int cols = total + n_art;

    // Phase 1: minimize the sum of artificials.
    if (n_art > 0) {
      std::vector<double> c1(cols, 0.0);
      for (int i = 0; i < m; ++i)
        if (art_col[i] >= 0) c1[art_col[i]] = 1.0;
      double v = run(A, b, basis, c1, cols);
      if (!std::isfinite(v)) return {LpStatus::IterationLimit, 0, {}};
      if (v > 1e-7) return {LpStatus::Infeasible, 0, {}};
      // drive remaining artificials out of the basis where possible
      for (int i = 0; i < m; ++i) {
        if (basis[i] >= total) {
          int pivot = -1;
          for (int j = 0; j < total; ++j)
            if (std::abs(A[i][j]) > eps_) {
              pivot = j;
              break;
            }
          if (pivot >= 0) do_pivot(A, b, basis, i, pivot, cols);
        }
      }
    }

    // Phase 2 on structural + slack columns only (forbid artificials).
    std::vector<double> c2(cols, 0.0);
    for (int j = 0; j < n; ++j) c2[j] = lp.objective[j];
    double big = 0;
    for (int j = 0; j < cols; ++j) big = std::max(big, std::abs(c2[j]));
    for (int j = total; j < cols; ++j) c2[j] = (big + 1) * 1e6;  // lock out
    double v = run(A, b, basis, c2, cols);
    if (!std::isfinite(v)) {
      return {v > 0 ? LpStatus::IterationLimit : LpStatus::Unbounded, 0, {}};
    }

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
      if (basis[i] >= 0 && basis[i] < n) sol.x[basis[i]] = b[i];
    sol.objective = 0;
    for (int j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.x[j];
    return sol;
  }

 private:
  double eps_;
  long long max_iters_;

  void do_pivot(std::vector<std::vector<double>>& A, std::vector<double>& b,
                std::vector<int>& basis, int row, int col, int cols) {
    double piv = A[row][col];
    for (int j = 0; j < cols; ++j) A[row][j] /= piv;
    b[row] /= piv;
    for (size_t i = 0; i < A.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      double f = A[i][col];
      if (std::abs(f) < eps_ * 1e-3) continue;
      for (int j = 0; j < cols; ++j) A[i][j] -= f * A[row][j];
      b[i] -= f * b[row];
    }
    basis[row] = col;
  }

  // Returns the optimal value; +inf on iteration limit, -inf on unbounded.
  double run(std::vector<std::vector<double>>& A, std::vector<double>& b,
             std::vector<int>& basis, const std::vector<double>& c,
             int cols) {
    const int m = static_cast<int>(A.size());
    for (long long iter = 0; iter < max_iters_; ++iter) {
      // reduced costs via basis multipliers: r_j = c_j - y.A_j with
      // y solving by substitution on the tableau (A already in basis form)
      std::vector<double> r(c);
      for (int i = 0; i < m; ++i) {
        double cb = c[basis[i]];
        if (cb == 0) continue;
        for (int j = 0; j < cols; ++j) r[j] -= cb * A[i][j];
      }
      int enter = -1;
      for (int j = 0; j < cols; ++j)  // Bland: first improving column
        if (r[j] < -eps_) {
          enter = j;
          break;
        }
      if (enter < 0) {
        double v = 0;
        for (int i = 0; i < m; ++i) v += c[basis[i]] * b[i];
        return v;
      }
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (A[i][enter] > eps_) {
          double t = b[i] / A[i][enter];
          if (t < best - eps_ ||
              (t < best + eps_ && (leave < 0 || basis[i] < basis[leave]))) {
            best = t;
            leave = i;
          }
        }
      }
      if (leave < 0) return -std::numeric_limits<double>::infinity();
      do_pivot(A, b, basis, leave, enter, cols);
    }
    return std::numeric_limits<double>::infinity();
  }
};

inline LpSolution solve_lp(const LpProblem& lp) {
  return SimplexSolver{}.solve(lp);
}

}  // namespace afplab
