#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "stacksim/errors.hpp"

namespace stacksim {

inline constexpr double kLpTol = 1e-9;
inline constexpr double kRatioTieTol = 1e-9;
inline constexpr double kPivotFloor = 1e-7;
inline constexpr double kLpAuditTol = 1e-6;

struct LinearConstraint {
  std::vector<double> coeffs;
  double bound = 0.0;
};

// Constraint set over free real variables:
//   coeffs . x <= bound   for every inequality
//   coeffs . x == bound   for every equality
// Variable sign restrictions are ordinary inequalities here; the CED and
// Hannan builders add nonnegativity rows explicitly.
struct LinearSystem {
  int num_vars = 0;
  std::vector<LinearConstraint> inequalities;
  std::vector<LinearConstraint> equalities;

  void add_le(std::vector<double> coeffs, double bound) {
    inequalities.push_back({std::move(coeffs), bound});
  }
  void add_eq(std::vector<double> coeffs, double value) {
    equalities.push_back({std::move(coeffs), value});
  }

  // x_i >= 0 for i in [first, first+count), and sum of those x_i == 1.
  void add_simplex(int first, int count) {
    for (int i = 0; i < count; ++i) {
      std::vector<double> row(num_vars, 0.0);
      row[first + i] = -1.0;
      add_le(std::move(row), 0.0);
    }
    std::vector<double> row(num_vars, 0.0);
    for (int i = 0; i < count; ++i) row[first + i] = 1.0;
    add_eq(std::move(row), 1.0);
  }

  void validate() const {
    for (const auto& c : inequalities)
      if (static_cast<int>(c.coeffs.size()) != num_vars)
        throw invalid_input_error("inequality coefficient vector has wrong length");
    for (const auto& c : equalities)
      if (static_cast<int>(c.coeffs.size()) != num_vars)
        throw invalid_input_error("equality coefficient vector has wrong length");
  }
};

enum class LpStatus { optimal, infeasible, unbounded };
enum class LpDirection { minimize, maximize };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> point;  // a basic optimal solution when status == optimal
};

namespace detail {

enum class IterOutcome { optimal, unbounded, stalled };

// Dense two-phase primal simplex over the tableau. The working rule is
// Dantzig entering (most negative reduced cost, lowest column index on ties)
// with the leaving row chosen among minimal-ratio rows by largest pivot
// element, which keeps the eliminations numerically sane on degenerate
// systems. That rule can cycle in principle, so a generous iteration cap
// hands the phase over to Bland's rule, which cannot. Both rules are
// deterministic, so solves are reproducible.
class SimplexTableau {
 public:
  SimplexTableau(int rows, int cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double& cost(int c) { return at(rows_, c); }

  void pivot(int pr, int pc) {
    const double piv = at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) /= piv;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    at(pr, pc) = 1.0;
  }

  // Two-pass ratio test for a fixed entering column. A basic value that has
  // drifted a hair negative is dust and counts as zero; without the clamp its
  // negative ratio wins the test outright and drags the solve through a
  // terrible pivot. Every row within a whisker of the minimal ratio is an
  // equally valid exit, so the second pass picks among them for numerical
  // stability (largest pivot element) or, under Bland's rule, lowest basic
  // index. Returns -1 when the column is unbounded below.
  int ratio_test(const std::vector<int>& basis, int entering, bool bland) {
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows_; ++r) {
      const double a = at(r, entering);
      if (a <= kLpTol) continue;
      const double ratio = std::max(rhs(r), 0.0) / a;
      if (ratio < best_ratio) best_ratio = ratio;
    }
    if (best_ratio == std::numeric_limits<double>::infinity()) return -1;

    const double window = best_ratio + kRatioTieTol * (1.0 + best_ratio);
    int leaving_row = -1;
    for (int r = 0; r < rows_; ++r) {
      const double a = at(r, entering);
      if (a <= kLpTol) continue;
      if (std::max(rhs(r), 0.0) / a > window) continue;
      if (leaving_row < 0) {
        leaving_row = r;
      } else if (bland ? basis[r] < basis[leaving_row] : a > at(leaving_row, entering)) {
        leaving_row = r;
      }
    }
    return leaving_row;
  }

  IterOutcome iterate_rule(std::vector<int>& basis, int allowed_cols, bool bland, long max_iters) {
    std::vector<char> passed_over(allowed_cols);
    for (long it = 0; it < max_iters; ++it) {
      // Entering columns are offered in rule order, but a column whose best
      // available pivot element is below the floor is passed over while any
      // usable alternative remains: dividing a row by a near-vanishing pivot
      // is how roundoff gets amplified into wholesale tableau corruption. If
      // every improving column is floored, the least bad one is taken rather
      // than stopping early with a falsely optimal verdict.
      std::fill(passed_over.begin(), passed_over.end(), 0);
      int pick_col = -1, pick_row = -1;
      double floored_pivot = 0.0;
      int floored_col = -1, floored_row = -1;
      while (true) {
        int entering = -1;
        if (bland) {
          for (int c = 0; c < allowed_cols; ++c) {
            if (!passed_over[c] && cost(c) < -kLpTol) {
              entering = c;
              break;
            }
          }
        } else {
          double most_negative = -kLpTol;
          for (int c = 0; c < allowed_cols; ++c) {
            if (!passed_over[c] && cost(c) < most_negative) {
              most_negative = cost(c);
              entering = c;
            }
          }
        }
        if (entering < 0) break;
        passed_over[entering] = 1;

        const int leaving_row = ratio_test(basis, entering, bland);
        if (leaving_row < 0) return IterOutcome::unbounded;
        const double a = at(leaving_row, entering);
        if (a >= kPivotFloor) {
          pick_col = entering;
          pick_row = leaving_row;
          break;
        }
        if (a > floored_pivot) {
          floored_pivot = a;
          floored_col = entering;
          floored_row = leaving_row;
        }
      }
      if (pick_col < 0) {
        if (floored_col < 0) return IterOutcome::optimal;
        pick_col = floored_col;
        pick_row = floored_row;
      }

      pivot(pick_row, pick_col);
      basis[pick_row] = pick_col;
    }
    return IterOutcome::stalled;
  }

  // Runs simplex iterations with columns [0, allowed_cols) eligible to enter.
  // The working rule gets a modest iteration budget before Bland's rule takes
  // over with a far larger one; a stalled outcome means even that ran out,
  // which floating point roundoff makes possible on degenerate systems.
  IterOutcome iterate(std::vector<int>& basis, int allowed_cols, bool force_bland = false) {
    const long cap = 200 + 50L * (rows_ + cols_);
    IterOutcome out = force_bland ? IterOutcome::stalled
                                  : iterate_rule(basis, allowed_cols, false, cap);
    if (out == IterOutcome::stalled) out = iterate_rule(basis, allowed_cols, true, 100 * cap);
    return out;
  }

  int rows_, cols_;
  std::vector<double> t_;
};

// Gaussian elimination with partial pivoting on an augmented square system;
// false when the matrix is numerically singular.
inline bool solve_square(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const int m = static_cast<int>(b.size());
  for (int k = 0; k < m; ++k) {
    int p = k;
    for (int r = k + 1; r < m; ++r)
      if (std::abs(a[r][k]) > std::abs(a[p][k])) p = r;
    if (std::abs(a[p][k]) < 1e-12) return false;
    std::swap(a[p], a[k]);
    std::swap(b[p], b[k]);
    for (int r = k + 1; r < m; ++r) {
      const double f = a[r][k] / a[k][k];
      if (f == 0.0) continue;
      for (int c = k; c < m; ++c) a[r][c] -= f * a[k][c];
      b[r] -= f * b[k];
    }
  }
  for (int k = m - 1; k >= 0; --k) {
    double s = b[k];
    for (int c = k + 1; c < m; ++c) s -= a[k][c] * b[c];
    b[k] = s / a[k][k];
  }
  return true;
}

inline bool point_satisfies(const std::vector<double>& x, const LinearSystem& system) {
  const int n = system.num_vars;
  for (const auto& c : system.inequalities) {
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += c.coeffs[j] * x[j];
    if (lhs > c.bound + kLpAuditTol) return false;
  }
  for (const auto& c : system.equalities) {
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += c.coeffs[j] * x[j];
    if (std::abs(lhs - c.bound) > kLpAuditTol) return false;
  }
  return true;
}

struct SolveAttempt {
  LpResult result;
  double phase1_residual = 0.0;
  bool audit_ok = true;
  bool stalled = false;
};

inline SolveAttempt lp_solve_attempt(const std::vector<double>& objective, LpDirection direction,
                                     const LinearSystem& system, bool force_bland) {
  const int n = system.num_vars;
  const int m_ineq = static_cast<int>(system.inequalities.size());

  // Row equilibration: every constraint is scaled to unit largest
  // coefficient, and the cost row to unit largest objective entry, so the
  // pivot and cost tolerances mean the same thing no matter what payoff
  // scale the caller works in. The feasible set and optimum are unchanged.
  LinearSystem scaled = system;
  const auto equilibrate = [](LinearConstraint& c) {
    double s = 0.0;
    for (double v : c.coeffs) s = std::max(s, std::abs(v));
    if (s == 0.0) return;
    for (double& v : c.coeffs) v /= s;
    c.bound /= s;
  };
  for (auto& c : scaled.inequalities) equilibrate(c);
  for (auto& c : scaled.equalities) equilibrate(c);
  double obj_scale = 0.0;
  for (double v : objective) obj_scale = std::max(obj_scale, std::abs(v));
  if (obj_scale == 0.0) obj_scale = 1.0;

  // Presolve: a row of the exact form -x_j <= 0 is a sign restriction, not a
  // structural constraint. Folding it into the variable keeps the tableau
  // free of the mass of degenerate zero-rhs rows such systems carry, which
  // otherwise feeds tiny-pivot churn on larger instances.
  std::vector<char> nonneg(n, 0);
  std::vector<char> keep_row(m_ineq, 1);
  for (int r = 0; r < m_ineq; ++r) {
    const LinearConstraint& c = scaled.inequalities[r];
    if (c.bound != 0.0) continue;
    int only = -1;
    bool singleton = true;
    for (int j = 0; j < n && singleton; ++j) {
      if (c.coeffs[j] == 0.0) continue;
      if (only >= 0)
        singleton = false;
      else
        only = j;
    }
    if (singleton && only >= 0 && c.coeffs[only] < 0.0) {
      nonneg[only] = 1;
      keep_row[r] = 0;
    }
  }

  std::vector<int> rows;  // indices into inequalities, then m_ineq + equalities
  for (int r = 0; r < m_ineq; ++r)
    if (keep_row[r]) rows.push_back(r);
  const int kept_ineq = static_cast<int>(rows.size());
  for (int r = 0; r < static_cast<int>(scaled.equalities.size()); ++r)
    rows.push_back(m_ineq + r);
  const int m = static_cast<int>(rows.size());

  // Nonnegative variables get one column; free variables split x = u - v.
  std::vector<int> var_col(n);
  int next_col = 0;
  for (int j = 0; j < n; ++j) {
    var_col[j] = next_col;
    next_col += nonneg[j] ? 1 : 2;
  }
  const int slack_start = next_col;
  const int art_start = slack_start + kept_ineq;
  int num_arts = static_cast<int>(scaled.equalities.size());
  for (int r = 0; r < m_ineq; ++r)
    if (keep_row[r] && scaled.inequalities[r].bound < 0.0) ++num_arts;
  const int cols = art_start + num_arts;

  detail::SimplexTableau tab(m, cols);
  std::vector<int> basis(m);

  int next_art = art_start;
  for (int r = 0; r < m; ++r) {
    const bool is_ineq = rows[r] < m_ineq;
    const LinearConstraint& c =
        is_ineq ? scaled.inequalities[rows[r]] : scaled.equalities[rows[r] - m_ineq];
    const double sign = c.bound < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tab.at(r, var_col[j]) = sign * c.coeffs[j];
      if (!nonneg[j]) tab.at(r, var_col[j] + 1) = -sign * c.coeffs[j];
    }
    if (is_ineq) tab.at(r, slack_start + r) = sign;
    tab.rhs(r) = sign * c.bound;
    if (is_ineq && sign > 0.0) {
      basis[r] = slack_start + r;
    } else {
      tab.at(r, next_art) = 1.0;
      basis[r] = next_art++;
    }
  }
  const std::vector<double> fresh = tab.t_;  // pristine rows for refactorization

  // Phase 1: minimize the sum of artificials.
  for (int c = art_start; c < cols; ++c) tab.cost(c) = 1.0;
  for (int r = 0; r < m; ++r) {
    if (basis[r] < art_start) continue;
    for (int c = 0; c <= cols; ++c) tab.at(m, c) -= tab.at(r, c);
  }
  const IterOutcome phase1 = tab.iterate(basis, cols, force_bland);
  SolveAttempt attempt;
  attempt.phase1_residual = -tab.rhs(m);
  // A stalled phase 1 that nonetheless drove the artificials to zero found a
  // feasible basis and may proceed; otherwise its verdict is untrustworthy.
  if (attempt.phase1_residual > 1e-7) {
    attempt.result.status = LpStatus::infeasible;
    attempt.stalled = phase1 != IterOutcome::optimal;
    return attempt;
  }

  // Pivot remaining artificials out; a row with no usable pivot column is
  // redundant and stays inert.
  for (int r = 0; r < m; ++r) {
    if (basis[r] < art_start) continue;
    for (int c = 0; c < art_start; ++c) {
      if (std::abs(tab.at(r, c)) > kLpTol) {
        tab.pivot(r, c);
        basis[r] = c;
        break;
      }
    }
  }

  // Phase 2: original objective over the variable columns (max as negated
  // min); artificial columns may not re-enter.
  const double dir_sign = direction == LpDirection::maximize ? -1.0 : 1.0;
  for (int c = 0; c <= cols; ++c) tab.cost(c) = 0.0;
  for (int j = 0; j < n; ++j) {
    tab.cost(var_col[j]) = dir_sign * objective[j] / obj_scale;
    if (!nonneg[j]) tab.cost(var_col[j] + 1) = -dir_sign * objective[j] / obj_scale;
  }
  for (int r = 0; r < m; ++r) {
    const double cb = tab.cost(basis[r]);
    if (cb == 0.0) continue;
    for (int c = 0; c <= cols; ++c) tab.at(m, c) -= cb * tab.at(r, c);
    tab.at(m, basis[r]) = 0.0;
  }
  const IterOutcome phase2 = tab.iterate(basis, art_start, force_bland);
  if (phase2 == IterOutcome::unbounded) {
    attempt.result.status = LpStatus::unbounded;
    return attempt;
  }
  attempt.stalled = phase2 != IterOutcome::optimal;

  auto point_from = [&](const std::vector<double>& basic_values) {
    std::vector<double> col_values(cols, 0.0);
    for (int r = 0; r < m; ++r) col_values[basis[r]] = basic_values[r];
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) {
      x[j] = col_values[var_col[j]];
      if (!nonneg[j]) x[j] -= col_values[var_col[j] + 1];
    }
    return x;
  };

  std::vector<double> basic(m);
  for (int r = 0; r < m; ++r) basic[r] = tab.rhs(r);
  std::vector<double> point = point_from(basic);

  // Long degenerate solves erode the eliminated tableau. Recomputing the
  // basic values from the pristine rows removes the drift; keep whichever
  // point actually satisfies the system.
  {
    std::vector<std::vector<double>> bmat(m, std::vector<double>(m));
    std::vector<double> brhs(m);
    const auto fresh_at = [&](int r, int c) {
      return fresh[static_cast<std::size_t>(r) * (cols + 1) + c];
    };
    for (int r = 0; r < m; ++r) {
      for (int k = 0; k < m; ++k) bmat[r][k] = fresh_at(r, basis[k]);
      brhs[r] = fresh_at(r, cols);
    }
    if (detail::solve_square(bmat, brhs)) {
      bool clean = true;
      for (double v : brhs)
        if (v < -kLpAuditTol) clean = false;
      const std::vector<double> refined = point_from(brhs);
      if (clean && detail::point_satisfies(refined, system)) point = refined;
    }
  }

  attempt.result.status = LpStatus::optimal;
  attempt.result.point = point;
  attempt.result.value = 0.0;
  for (int j = 0; j < n; ++j) attempt.result.value += objective[j] * point[j];
  attempt.audit_ok = detail::point_satisfies(point, system);
  return attempt;
}

}  // namespace detail

// Optimizes objective . x over the system. Infeasible and unbounded are
// returned statuses, not errors. A claimed optimum is audited against the
// original constraints, and a verdict is only accepted when the solve behind
// it converged cleanly: an audit failure, a stall, or an infeasibility call
// with a suspiciously small phase 1 residual triggers one full re-solve under
// Bland's rule from the start. A solve that cannot produce a defensible
// verdict either way is an internal fault, never a silent wrong answer.
inline LpResult lp_solve(const std::vector<double>& objective, LpDirection direction,
                         const LinearSystem& system) {
  system.validate();
  if (static_cast<int>(objective.size()) != system.num_vars)
    throw invalid_input_error("objective vector has wrong length");

  const auto solid = [](const detail::SolveAttempt& a) {
    if (a.stalled) return false;
    if (a.result.status == LpStatus::optimal) return a.audit_ok;
    if (a.result.status == LpStatus::infeasible) return a.phase1_residual >= 1e-3;
    return true;  // unbounded comes with an explicit certificate column
  };

  const detail::SolveAttempt first = detail::lp_solve_attempt(objective, direction, system, false);
  if (solid(first)) return first.result;
  const detail::SolveAttempt second = detail::lp_solve_attempt(objective, direction, system, true);
  if (solid(second)) return second.result;
  // A clean finish whose infeasibility margin is merely small is still a
  // defensible verdict once both pivot rules agree nothing better exists.
  if (!second.stalled && second.result.status == LpStatus::infeasible) return second.result;
  if (second.result.status == LpStatus::optimal && !second.audit_ok)
    throw internal_error("simplex returned an infeasible point");
  throw internal_error("simplex failed to converge");
}

// Feasibility check: any point satisfying the system.
inline bool lp_feasible(const LinearSystem& system) {
  return lp_solve(std::vector<double>(system.num_vars, 0.0), LpDirection::minimize, system)
             .status == LpStatus::optimal;
}

}  // namespace stacksim
