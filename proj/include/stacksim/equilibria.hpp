#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stacksim/errors.hpp"
#include "stacksim/game.hpp"
#include "stacksim/lp.hpp"

namespace stacksim {

inline constexpr int kNashPlayerCap = 3;
inline constexpr int kNashActionCap = 4;
inline constexpr double kNashVerifyTol = 1e-7;
inline constexpr double kDefaultGridResolution = 1.0 / 50.0;

enum class SetKind { ced, hannan };

inline std::string to_string(SetKind kind) {
  return kind == SetKind::ced ? "CED" : "Hannan";
}

// True iff some mixture over the player's OTHER actions does at least as well
// as `action` against every pure profile of the opponents. Single-action
// players have nothing to dominate with.
inline bool is_very_weakly_dominated(const GameSpec& game, int player, int action) {
  const int k = game.num_actions(player);
  if (action < 0 || action >= k) throw invalid_input_error("dominance check on unknown action");
  if (k < 2) return false;

  std::vector<int> others;  // the candidate mixture's support
  for (int a = 0; a < k; ++a)
    if (a != action) others.push_back(a);

  LinearSystem sys;
  sys.num_vars = k - 1;
  sys.add_simplex(0, k - 1);

  std::vector<int> counts = action_counts(game);
  counts[player] = 1;
  std::vector<int> profile(game.num_players, 0);
  do {
    std::vector<int> full = profile;
    full[player] = action;
    const double target = game.utility(player, full);
    std::vector<double> row(k - 1);
    for (int j = 0; j < k - 1; ++j) {
      full[player] = others[j];
      row[j] = -game.utility(player, full);  // mixture payoff >= target
    }
    sys.add_le(std::move(row), -target);
  } while (next_profile(profile, counts));
  return lp_feasible(sys);
}

// CED(G): one variable per pure profile; for every player i and ordered
// action pair (a, a'), the mass on rounds where i plays a must not prefer
// the swap to a':
//   sum over profiles with a_i = a of Phi(a) * (u_i(a', a_-i) - u_i(a, a_-i)) <= 0.
inline LinearSystem build_ced_system(const GameSpec& game) {
  const std::int64_t cells = game.profile_count();
  LinearSystem sys;
  sys.num_vars = static_cast<int>(cells);
  sys.add_simplex(0, static_cast<int>(cells));

  const std::vector<int> counts = action_counts(game);
  for (int i = 0; i < game.num_players; ++i) {
    const int k = game.num_actions(i);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (a == b) continue;
        std::vector<double> row(cells, 0.0);
        std::vector<int> profile(game.num_players, 0);
        std::int64_t idx = 0;
        do {
          if (profile[i] == a) {
            std::vector<int> swapped = profile;
            swapped[i] = b;
            row[idx] = game.utility(i, swapped) - game.utility(i, profile);
          }
          ++idx;
        } while (next_profile(profile, counts));
        sys.add_le(std::move(row), 0.0);
      }
    }
  }
  return sys;
}

// Hannan set H(G): no constant deviation profits on average; one inequality
// per player per deviation action:
//   sum over all profiles of Phi(a) * (u_i(a', a_-i) - u_i(a)) <= 0.
inline LinearSystem build_hannan_system(const GameSpec& game) {
  const std::int64_t cells = game.profile_count();
  LinearSystem sys;
  sys.num_vars = static_cast<int>(cells);
  sys.add_simplex(0, static_cast<int>(cells));

  const std::vector<int> counts = action_counts(game);
  for (int i = 0; i < game.num_players; ++i) {
    const int k = game.num_actions(i);
    for (int b = 0; b < k; ++b) {
      std::vector<double> row(cells, 0.0);
      std::vector<int> profile(game.num_players, 0);
      std::int64_t idx = 0;
      do {
        std::vector<int> swapped = profile;
        swapped[i] = b;
        row[idx] = game.utility(i, swapped) - game.utility(i, profile);
        ++idx;
      } while (next_profile(profile, counts));
      sys.add_le(std::move(row), 0.0);
    }
  }
  return sys;
}

inline LinearSystem build_polytope_system(const GameSpec& game, SetKind kind) {
  return kind == SetKind::ced ? build_ced_system(game) : build_hannan_system(game);
}

struct PolytopeOpt {
  double value = 0.0;
  JointDistribution phi;  // the optimizing distribution over learner profiles
};

// Optimizes the optimizer's payoff u_n(Phi, alpha) over CED(G_alpha) or
// H(G_alpha). Both polytopes contain every Nash distribution of G_alpha, so
// infeasibility can only mean a broken invariant.
inline PolytopeOpt min_or_max_over_polytope(const GameSpec& game, const MixedStrategy& alpha,
                                            SetKind set_kind, LpDirection direction) {
  const GameSpec induced = induce_game(game, alpha);
  const LinearSystem sys = build_polytope_system(induced, set_kind);
  const std::vector<double>& objective = induced.utilities[game.num_players - 1];

  LpResult res = lp_solve(objective, direction, sys);
  if (res.status != LpStatus::optimal)
    throw internal_error("optimization over a nonempty equilibrium polytope failed");

  PolytopeOpt out;
  out.value = res.value;
  out.phi.scope.resize(induced.num_players);
  for (int i = 0; i < induced.num_players; ++i) out.phi.scope[i] = i;
  out.phi.probs = std::move(res.point);
  for (double& p : out.phi.probs)
    if (p < 0.0) p = 0.0;  // LP roundoff
  return out;
}

struct L1Projection {
  double distance = 0.0;
  JointDistribution projection;  // nearest point Psi of the polytope
};

// L1 distance from `dist` to CED(G_alpha) or H(G_alpha), with the projection:
//   minimize sum_j d_j  s.t.  Phi in polytope, -d_j <= Phi_j - dist_j <= d_j.
inline L1Projection l1_distance_to_set(const JointDistribution& dist, const GameSpec& game,
                                       const MixedStrategy& alpha, SetKind set_kind) {
  const GameSpec induced = induce_game(game, alpha);
  validate_distribution(dist, induced);
  for (int i = 0; i < induced.num_players; ++i)
    if (i >= static_cast<int>(dist.scope.size()) || dist.scope[i] != i)
      throw invalid_input_error("distance is defined for distributions over the learners");

  LinearSystem sys = build_polytope_system(induced, set_kind);
  const int cells = sys.num_vars;
  sys.num_vars = 2 * cells;  // [Phi, d]
  for (auto& c : sys.inequalities) c.coeffs.resize(2 * cells, 0.0);
  for (auto& c : sys.equalities) c.coeffs.resize(2 * cells, 0.0);
  for (int j = 0; j < cells; ++j) {
    std::vector<double> up(2 * cells, 0.0);
    up[j] = 1.0;
    up[cells + j] = -1.0;
    sys.add_le(std::move(up), dist.probs[j]);  // Phi_j - d_j <= dist_j
    std::vector<double> down(2 * cells, 0.0);
    down[j] = -1.0;
    down[cells + j] = -1.0;
    sys.add_le(std::move(down), -dist.probs[j]);  // dist_j - Phi_j <= d_j
  }

  std::vector<double> objective(2 * cells, 0.0);
  for (int j = 0; j < cells; ++j) objective[cells + j] = 1.0;
  LpResult res = lp_solve(objective, LpDirection::minimize, sys);
  if (res.status != LpStatus::optimal)
    throw internal_error("L1 projection onto a nonempty polytope failed");

  L1Projection out;
  out.distance = std::max(0.0, res.value);
  out.projection.scope.resize(induced.num_players);
  for (int i = 0; i < induced.num_players; ++i) out.projection.scope[i] = i;
  out.projection.probs.assign(res.point.begin(), res.point.begin() + cells);
  for (double& p : out.projection.probs)
    if (p < 0.0) p = 0.0;
  return out;
}

// All pure profiles where every player's action is a best reply to the rest.
inline std::vector<std::vector<int>> pure_nash_profiles(const GameSpec& game) {
  std::vector<std::vector<int>> found;
  const std::vector<int> counts = action_counts(game);
  std::vector<int> profile(game.num_players, 0);
  do {
    bool nash = true;
    for (int i = 0; i < game.num_players && nash; ++i) {
      MixedProfile others;
      for (int j = 0; j < game.num_players; ++j)
        if (j != i)
          others.strategies.push_back(
              MixedStrategy::point_mass(j, game.num_actions(j), profile[j]));
      const std::vector<int> reply = best_reply_set(game, i, others);
      nash = std::find(reply.begin(), reply.end(), profile[i]) != reply.end();
    }
    if (nash) found.push_back(profile);
  } while (next_profile(profile, counts));
  return found;
}

namespace detail {

// Gaussian elimination with partial pivoting; returns false when singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

inline bool verified_nash(const GameSpec& game, const MixedProfile& profile) {
  for (int i = 0; i < game.num_players; ++i) {
    MixedProfile others;
    for (const auto& s : profile.strategies)
      if (s.player != i) others.strategies.push_back(s);
    const int k = game.num_actions(i);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(k);
    for (int a = 0; a < k; ++a) {
      vals[a] = action_value(game, i, a, others);
      best = std::max(best, vals[a]);
    }
    const MixedStrategy* own = profile.find(i);
    for (int a = 0; a < k; ++a)
      if (own->probs[a] > 1e-9 && vals[a] < best - kNashVerifyTol) return false;
  }
  return true;
}

inline std::vector<double> flatten_profile(const MixedProfile& profile) {
  std::vector<double> flat;
  for (const auto& s : profile.strategies) flat.insert(flat.end(), s.probs.begin(), s.probs.end());
  return flat;
}

inline void add_if_new(std::vector<MixedProfile>& out, MixedProfile candidate) {
  const std::vector<double> flat = flatten_profile(candidate);
  for (const auto& existing : out) {
    const std::vector<double> other = flatten_profile(existing);
    double diff = 0.0;
    for (std::size_t j = 0; j < flat.size(); ++j) diff = std::max(diff, std::abs(flat[j] - other[j]));
    if (diff < 1e-6) return;
  }
  out.push_back(std::move(candidate));
}

// Candidate from raw numbers: clamp tiny negatives, renormalize, verify.
inline void accept_candidate(const GameSpec& game, std::vector<std::vector<double>> probs,
                             std::vector<MixedProfile>& out) {
  MixedProfile candidate;
  for (int i = 0; i < game.num_players; ++i) {
    double sum = 0.0;
    for (double& p : probs[i]) {
      if (p < -1e-8) return;
      if (p < 0.0) p = 0.0;
      if (p > 1.0 + 1e-8) return;
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) return;
    for (double& p : probs[i]) p /= sum;
    candidate.strategies.push_back({i, std::move(probs[i])});
  }
  if (verified_nash(game, candidate)) add_if_new(out, std::move(candidate));
}

// Nonempty subsets of {0..k-1} in ascending bitmask order.
inline std::vector<std::vector<int>> supports_of(int k) {
  std::vector<std::vector<int>> subsets;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> s;
    for (int a = 0; a < k; ++a)
      if (mask & (1 << a)) s.push_back(a);
    subsets.push_back(std::move(s));
  }
  return subsets;
}

// Two-player support enumeration: for each support pair the Nash conditions
// (indifference on support, no profitable deviation off it) are linear in
// (x_1, x_2, v_1, v_2), so each candidate is an LP feasibility problem.
inline std::vector<MixedProfile> nash_two_player(const GameSpec& game) {
  const int k1 = game.num_actions(0), k2 = game.num_actions(1);
  std::vector<MixedProfile> out;

  for (const auto& s1 : supports_of(k1)) {
    for (const auto& s2 : supports_of(k2)) {
      LinearSystem sys;
      sys.num_vars = k1 + k2 + 2;  // [x1, x2, v1, v2]
      const int v1 = k1 + k2, v2 = k1 + k2 + 1;
      sys.add_simplex(0, k1);
      sys.add_simplex(k1, k2);
      auto in = [](const std::vector<int>& s, int a) {
        return std::find(s.begin(), s.end(), a) != s.end();
      };
      for (int a = 0; a < k1; ++a) {
        if (!in(s1, a)) {
          std::vector<double> row(sys.num_vars, 0.0);
          row[a] = 1.0;
          sys.add_eq(std::move(row), 0.0);
          continue;
        }
        std::vector<double> row(sys.num_vars, 0.0);  // u_1(a, x2) vs v1
        for (int b = 0; b < k2; ++b) row[k1 + b] = game.utility(0, {a, b});
        row[v1] = -1.0;
        sys.add_eq(std::move(row), 0.0);
      }
      for (int a = 0; a < k1; ++a) {
        if (in(s1, a)) continue;
        std::vector<double> row(sys.num_vars, 0.0);
        for (int b = 0; b < k2; ++b) row[k1 + b] = game.utility(0, {a, b});
        row[v1] = -1.0;
        sys.add_le(std::move(row), 0.0);
      }
      for (int b = 0; b < k2; ++b) {
        std::vector<double> row(sys.num_vars, 0.0);
        if (!in(s2, b)) {
          row[k1 + b] = 1.0;
          sys.add_eq(std::move(row), 0.0);
          continue;
        }
        for (int a = 0; a < k1; ++a) row[a] = game.utility(1, {a, b});
        row[v2] = -1.0;
        sys.add_eq(std::move(row), 0.0);
      }
      for (int b = 0; b < k2; ++b) {
        if (in(s2, b)) continue;
        std::vector<double> row(sys.num_vars, 0.0);
        for (int a = 0; a < k1; ++a) row[a] = game.utility(1, {a, b});
        row[v2] = -1.0;
        sys.add_le(std::move(row), 0.0);
      }

      LpResult res = lp_solve(std::vector<double>(sys.num_vars, 0.0), LpDirection::minimize, sys);
      if (res.status != LpStatus::optimal) continue;
      accept_candidate(game,
                       {{res.point.begin(), res.point.begin() + k1},
                        {res.point.begin() + k1, res.point.begin() + k1 + k2}},
                       out);
    }
  }
  return out;
}

// Three-player supports give bilinear indifference systems; each support
// triple is solved by Newton iteration from several deterministic starts and
// every converged point is verified as a Nash profile of the full game.
// Degenerate games with equilibrium continua yield representatives.
inline std::vector<MixedProfile> nash_three_player(const GameSpec& game) {
  std::vector<MixedProfile> out;
  const int k[3] = {game.num_actions(0), game.num_actions(1), game.num_actions(2)};

  for (const auto& s0 : supports_of(k[0])) {
    for (const auto& s1 : supports_of(k[1])) {
      for (const auto& s2 : supports_of(k[2])) {
        const std::vector<int>* s[3] = {&s0, &s1, &s2};
        const int sz[3] = {static_cast<int>(s0.size()), static_cast<int>(s1.size()),
                           static_cast<int>(s2.size())};
        const int off[3] = {0, sz[0], sz[0] + sz[1]};
        const int vanchor = sz[0] + sz[1] + sz[2];
        const int dim = vanchor + 3;

        auto full_strategies = [&](const std::vector<double>& z) {
          std::vector<std::vector<double>> x(3);
          for (int i = 0; i < 3; ++i) {
            x[i].assign(k[i], 0.0);
            for (int j = 0; j < sz[i]; ++j) x[i][(*s[i])[j]] = z[off[i] + j];
          }
          return x;
        };

        // F(z) = 0: indifference u_i(a, x_-i) = v_i on the support, plus
        // each support summing to one.
        auto residual = [&](const std::vector<double>& z) {
          const auto x = full_strategies(z);
          std::vector<double> f(dim, 0.0);
          int row = 0;
          for (int i = 0; i < 3; ++i) {
            const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            for (int si = 0; si < sz[i]; ++si, ++row) {
              const int a = (*s[i])[si];
              double u = 0.0;
              std::vector<int> prof(3);
              prof[i] = a;
              for (int b : *s[j1])
                for (int c : *s[j2]) {
                  prof[j1] = b;
                  prof[j2] = c;
                  u += x[j1][b] * x[j2][c] * game.utility(i, prof);
                }
              f[row] = u - z[vanchor + i];
            }
          }
          for (int i = 0; i < 3; ++i, ++row) {
            double sum = 0.0;
            for (int j = 0; j < sz[i]; ++j) sum += z[off[i] + j];
            f[row] = sum - 1.0;
          }
          return f;
        };

        auto jacobian = [&](const std::vector<double>& z) {
          const auto x = full_strategies(z);
          std::vector<std::vector<double>> jm(dim, std::vector<double>(dim, 0.0));
          int row = 0;
          for (int i = 0; i < 3; ++i) {
            const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            for (int si = 0; si < sz[i]; ++si, ++row) {
              const int a = (*s[i])[si];
              std::vector<int> prof(3);
              prof[i] = a;
              for (int jb = 0; jb < sz[j1]; ++jb) {
                const int b = (*s[j1])[jb];
                double d = 0.0;
                for (int c : *s[j2]) {
                  prof[j1] = b;
                  prof[j2] = c;
                  d += x[j2][c] * game.utility(i, prof);
                }
                jm[row][off[j1] + jb] = d;
              }
              for (int jc = 0; jc < sz[j2]; ++jc) {
                const int c = (*s[j2])[jc];
                double d = 0.0;
                for (int b : *s[j1]) {
                  prof[j1] = b;
                  prof[j2] = c;
                  d += x[j1][b] * game.utility(i, prof);
                }
                jm[row][off[j2] + jc] = d;
              }
              jm[row][vanchor + i] = -1.0;
            }
          }
          for (int i = 0; i < 3; ++i, ++row)
            for (int j = 0; j < sz[i]; ++j) jm[row][off[i] + j] = 1.0;
          return jm;
        };

        std::uint64_t lcg = 0x2545F4914F6CDD1Dull;
        auto next_unit = [&lcg]() {  // deterministic multistart jitter in [0,1)
          lcg = lcg * 6364136223846793005ull + 1442695040888963407ull;
          return static_cast<double>(lcg >> 11) * 0x1.0p-53;
        };

        const int starts = 6, max_iters = 80;
        for (int trial = 0; trial < starts; ++trial) {
          std::vector<double> z(dim, 0.0);
          for (int i = 0; i < 3; ++i) {
            double sum = 0.0;
            std::vector<double> w(sz[i]);
            for (int j = 0; j < sz[i]; ++j) {
              w[j] = trial == 0 ? 1.0 : 0.25 + next_unit();
              sum += w[j];
            }
            for (int j = 0; j < sz[i]; ++j) z[off[i] + j] = w[j] / sum;
          }
          {
            const std::vector<double> f0 = residual(z);
            for (int i = 0, row = 0; i < 3; ++i) {
              double v = 0.0;
              for (int si = 0; si < sz[i]; ++si, ++row) v += f0[row];
              z[vanchor + i] = v / sz[i];  // consistent initial v_i
            }
          }

          bool converged = false;
          for (int it = 0; it < max_iters; ++it) {
            const std::vector<double> f = residual(z);
            double norm = 0.0;
            for (double v : f) norm = std::max(norm, std::abs(v));
            if (norm < 1e-12) {
              converged = true;
              break;
            }
            if (norm > 1e6) break;
            std::vector<double> rhs(dim);
            for (int j = 0; j < dim; ++j) rhs[j] = -f[j];
            std::vector<double> delta;
            if (!solve_linear(jacobian(z), rhs, delta)) break;
            double step = 0.0;
            for (double v : delta) step = std::max(step, std::abs(v));
            const double scale = step > 1.0 ? 1.0 / step : 1.0;
            for (int j = 0; j < dim; ++j) z[j] += scale * delta[j];
          }
          if (!converged) continue;

          auto x = full_strategies(z);
          bool off_support_ok = true;
          for (int i = 0; i < 3 && off_support_ok; ++i) {
            // Deviations outside the support must not beat v_i.
            const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            for (int a = 0; a < k[i] && off_support_ok; ++a) {
              if (x[i][a] != 0.0 ||
                  std::find(s[i]->begin(), s[i]->end(), a) != s[i]->end())
                continue;
              double u = 0.0;
              std::vector<int> prof(3);
              prof[i] = a;
              for (int b : *s[j1])
                for (int c : *s[j2]) {
                  prof[j1] = b;
                  prof[j2] = c;
                  u += x[j1][b] * x[j2][c] * game.utility(i, prof);
                }
              if (u > z[vanchor + i] + kNashVerifyTol) off_support_ok = false;
            }
          }
          if (off_support_ok) accept_candidate(game, std::move(x), out);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// All Nash profiles of a small game (representatives, for degenerate games
// with continua). One player: point masses on the argmax actions, which are
// exactly the vertices of the Nash face.
inline std::vector<MixedProfile> mixed_nash_support_enumeration(const GameSpec& game) {
  if (game.num_players > kNashPlayerCap)
    throw unsupported_size_error("Nash enumeration supports at most " +
                                 std::to_string(kNashPlayerCap) + " players, got " +
                                 std::to_string(game.num_players));
  for (int i = 0; i < game.num_players; ++i)
    if (game.num_actions(i) > kNashActionCap)
      throw unsupported_size_error("Nash enumeration supports at most " +
                                   std::to_string(kNashActionCap) + " actions per player, got " +
                                   std::to_string(game.num_actions(i)));

  std::vector<MixedProfile> found;
  if (game.num_players == 1) {
    const std::vector<double>& u = game.utilities[0];
    const double best = *std::max_element(u.begin(), u.end());
    for (int a = 0; a < game.num_actions(0); ++a)
      if (u[a] >= best - kBestReplyTol)
        found.push_back({{MixedStrategy::point_mass(0, game.num_actions(0), a)}});
  } else if (game.num_players == 2) {
    found = detail::nash_two_player(game);
  } else {
    found = detail::nash_three_player(game);
  }

  std::sort(found.begin(), found.end(), [](const MixedProfile& a, const MixedProfile& b) {
    return detail::flatten_profile(a) < detail::flatten_profile(b);
  });
  return found;
}

// One Stackelberg value: the optimizer's payoff, the commitment alpha that
// attains it, the learners' response as a distribution over their profiles,
// and how the number was obtained.
struct StackelbergValue {
  double value = 0.0;
  MixedStrategy alpha;
  JointDistribution response;
  std::string method;
};

namespace detail {

inline JointDistribution learner_point_mass(const GameSpec& induced, const std::vector<int>& z) {
  JointDistribution d;
  d.scope.resize(induced.num_players);
  for (int i = 0; i < induced.num_players; ++i) d.scope[i] = i;
  d.probs.assign(induced.profile_count(), 0.0);
  d.probs[induced.index_of(z)] = 1.0;
  return d;
}

inline JointDistribution learner_product(const GameSpec& induced, const MixedProfile& profile) {
  JointDistribution d;
  d.scope.resize(induced.num_players);
  for (int i = 0; i < induced.num_players; ++i) d.scope[i] = i;
  d.probs.assign(induced.profile_count(), 0.0);
  const std::vector<int> counts = action_counts(induced);
  std::vector<int> z(induced.num_players, 0);
  std::int64_t idx = 0;
  do {
    double w = 1.0;
    for (int i = 0; i < induced.num_players; ++i) w *= profile.find(i)->probs[z[i]];
    d.probs[idx] = w;
    ++idx;
  } while (next_profile(z, counts));
  return d;
}

struct InnerEval {
  double value = 0.0;
  JointDistribution response;
};

struct BestAlpha {
  double value = 0.0;
  std::vector<double> alpha;
  JointDistribution response;
};

// Lattice points m/D of the simplex with lo <= m <= hi componentwise,
// visited in ascending lexicographic order.
template <typename Fn>
void for_each_lattice(int k, int D, const std::vector<int>& lo, const std::vector<int>& hi,
                      Fn&& fn) {
  std::vector<int> lo_suffix(k + 1, 0), hi_suffix(k + 1, 0);
  for (int j = k - 1; j >= 0; --j) {
    lo_suffix[j] = lo_suffix[j + 1] + lo[j];
    hi_suffix[j] = hi_suffix[j + 1] + hi[j];
  }
  std::vector<int> m(k, 0);
  std::function<void(int, int)> rec = [&](int j, int remaining) {
    if (j == k - 1) {
      if (remaining >= lo[j] && remaining <= hi[j]) {
        m[j] = remaining;
        std::vector<double> alpha(k);
        for (int i = 0; i < k; ++i) alpha[i] = static_cast<double>(m[i]) / D;
        fn(alpha);
      }
      return;
    }
    const int vmin = std::max(lo[j], remaining - hi_suffix[j + 1]);
    const int vmax = std::min(hi[j], remaining - lo_suffix[j + 1]);
    for (int v = vmin; v <= vmax; ++v) {
      m[j] = v;
      rec(j + 1, remaining - v);
    }
  };
  if (k > 0) rec(0, D);
}

// Outer maximization over the optimizer's simplex: uniform lattice of mesh
// `resolution`, the caller's extra candidate points, then two local
// refinement passes at half and quarter mesh around the incumbent. Strict
// improvement keeps the lexicographically smallest maximizer among lattice
// ties. `inner` may decline a point (no admissible response there).
inline std::optional<BestAlpha> maximize_over_simplex(
    int k, double resolution, const std::vector<std::vector<double>>& extra_candidates,
    const std::function<std::optional<InnerEval>(const std::vector<double>&)>& inner) {
  const int R = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
  std::optional<BestAlpha> best;

  auto consider = [&](const std::vector<double>& alpha) {
    std::optional<InnerEval> eval = inner(alpha);
    if (!eval) return;
    if (!best || eval->value > best->value)
      best = BestAlpha{eval->value, alpha, std::move(eval->response)};
  };

  for_each_lattice(k, R, std::vector<int>(k, 0), std::vector<int>(k, R), consider);
  for (const auto& alpha : extra_candidates) {
    if (static_cast<int>(alpha.size()) != k)
      throw invalid_input_error("candidate commitment has wrong length");
    consider(alpha);
  }
  if (k == 1) return best;  // single-point simplex: nothing to refine

  for (int pass = 1; pass <= 2 && best; ++pass) {
    const int D = R << pass;
    const double width = 1.0 / (R << (pass - 1));
    std::vector<int> lo(k), hi(k);
    for (int j = 0; j < k; ++j) {
      lo[j] = std::max(0, static_cast<int>(std::ceil((best->alpha[j] - width) * D - 1e-9)));
      hi[j] = std::min(D, static_cast<int>(std::floor((best->alpha[j] + width) * D + 1e-9)));
    }
    for_each_lattice(k, D, lo, hi, consider);
  }
  return best;
}

inline std::string grid_method(int k, double resolution) {
  if (k == 1) return "exact-lp";
  return "grid(1/" + std::to_string(std::max(1, static_cast<int>(std::lround(1.0 / resolution)))) +
         ")";
}

inline void check_is_full_game(const GameSpec& game) {
  if (game.num_players < 2)
    throw invalid_input_error("Stackelberg values need an optimizer and at least one learner");
}

}  // namespace detail

// Pessimistic value against correlated-equilibrium responses:
//   max over alpha of  min over Phi in CED(G_alpha) of u_n(Phi, alpha).
inline StackelbergValue correlated_stackelberg_value(
    const GameSpec& game, double grid_resolution = kDefaultGridResolution,
    const std::vector<std::vector<double>>& extra_candidates = {}) {
  detail::check_is_full_game(game);
  const int n = game.num_players, kn = game.num_actions(n - 1);
  auto inner = [&](const std::vector<double>& a) -> std::optional<detail::InnerEval> {
    const MixedStrategy alpha{n - 1, a};
    PolytopeOpt opt = min_or_max_over_polytope(game, alpha, SetKind::ced, LpDirection::minimize);
    return detail::InnerEval{opt.value, std::move(opt.phi)};
  };
  auto best = detail::maximize_over_simplex(kn, grid_resolution, extra_candidates, inner);
  return {best->value, {n - 1, best->alpha}, std::move(best->response),
          detail::grid_method(kn, grid_resolution)};
}

// Pessimistic value against Hannan-set responses; H contains CED, so this
// never exceeds the correlated value.
inline StackelbergValue hannan_stackelberg_value(
    const GameSpec& game, double grid_resolution = kDefaultGridResolution,
    const std::vector<std::vector<double>>& extra_candidates = {}) {
  detail::check_is_full_game(game);
  const int n = game.num_players, kn = game.num_actions(n - 1);
  auto inner = [&](const std::vector<double>& a) -> std::optional<detail::InnerEval> {
    const MixedStrategy alpha{n - 1, a};
    PolytopeOpt opt = min_or_max_over_polytope(game, alpha, SetKind::hannan, LpDirection::minimize);
    return detail::InnerEval{opt.value, std::move(opt.phi)};
  };
  auto best = detail::maximize_over_simplex(kn, grid_resolution, extra_candidates, inner);
  return {best->value, {n - 1, best->alpha}, std::move(best->response),
          detail::grid_method(kn, grid_resolution)};
}

struct MixedStackelbergValues {
  StackelbergValue optimistic;   // learners break ties for the optimizer
  StackelbergValue pessimistic;  // learners break ties against
};

namespace detail {

inline std::optional<InnerEval> mixed_inner(const GameSpec& game, const std::vector<double>& a,
                                            bool optimistic) {
  const int n = game.num_players;
  const MixedStrategy alpha{n - 1, a};
  const GameSpec induced = induce_game(game, alpha);
  const std::vector<MixedProfile> equilibria = mixed_nash_support_enumeration(induced);
  if (equilibria.empty()) return std::nullopt;  // numerically missed; skip this point

  bool have = false;
  double best_value = 0.0;
  const MixedProfile* best_profile = nullptr;
  for (const auto& profile : equilibria) {
    const double v = expected_utility(induced, profile, n - 1);
    if (!have || (optimistic ? v > best_value : v < best_value)) {
      have = true;
      best_value = v;
      best_profile = &profile;
    }
  }
  return InnerEval{best_value, learner_product(induced, *best_profile)};
}

}  // namespace detail

// Grid-search approximations of the mixed-response Stackelberg values: at
// each commitment enumerate the Nash profiles of the induced learner game
// and score the best (optimistic) or worst (pessimistic) one.
inline MixedStackelbergValues mixed_stackelberg_values(
    const GameSpec& game, double grid_resolution = kDefaultGridResolution,
    const std::vector<std::vector<double>>& extra_optimistic = {},
    const std::vector<std::vector<double>>& extra_pessimistic = {}) {
  detail::check_is_full_game(game);
  const int n = game.num_players, kn = game.num_actions(n - 1);
  if (n - 1 > kNashPlayerCap)
    throw unsupported_size_error("too many learners for Nash enumeration");
  for (int i = 0; i < n - 1; ++i)
    if (game.num_actions(i) > kNashActionCap)
      throw unsupported_size_error("a learner exceeds the Nash enumeration action cap");

  auto inner_opt = [&](const std::vector<double>& a) {
    return detail::mixed_inner(game, a, true);
  };
  auto inner_pess = [&](const std::vector<double>& a) {
    return detail::mixed_inner(game, a, false);
  };
  auto best_opt = detail::maximize_over_simplex(kn, grid_resolution, extra_optimistic, inner_opt);
  auto best_pess =
      detail::maximize_over_simplex(kn, grid_resolution, extra_pessimistic, inner_pess);
  if (!best_opt || !best_pess)
    throw internal_error("Nash enumeration found no equilibrium at any grid point");

  const std::string method = detail::grid_method(kn, grid_resolution);
  return {{best_opt->value, {n - 1, best_opt->alpha}, std::move(best_opt->response), method},
          {best_pess->value, {n - 1, best_pess->alpha}, std::move(best_pess->response), method}};
}

struct PureStackelbergValues {
  // Pure Stackelberg equilibria may not exist; that is an answer, not a fault.
  std::optional<StackelbergValue> optimistic;   // V_pure, exact
  std::optional<StackelbergValue> pessimistic;  // v_pure, grid approximation
};

// V_pure exactly: for a fixed pure learner profile z the set of commitments
// making z a Nash response is cut out by linear best-reply constraints, so
// max u_n(z, alpha) over it is an LP; V_pure is the best feasible z. v_pure
// by the shared outer grid: at each alpha the learners pick the pure Nash
// profile the optimizer likes least.
inline PureStackelbergValues pure_stackelberg_values(
    const GameSpec& game, double grid_resolution = kDefaultGridResolution,
    const std::vector<std::vector<double>>& extra_pessimistic = {}) {
  detail::check_is_full_game(game);
  const int n = game.num_players, kn = game.num_actions(n - 1);

  PureStackelbergValues out;

  std::vector<int> learner_counts(n - 1);
  for (int i = 0; i < n - 1; ++i) learner_counts[i] = game.num_actions(i);

  std::vector<int> z(n - 1, 0);
  do {
    LinearSystem sys;
    sys.num_vars = kn;
    sys.add_simplex(0, kn);
    std::vector<int> profile(n);
    for (int i = 0; i < n - 1; ++i) profile[i] = z[i];
    for (int i = 0; i < n - 1; ++i) {
      for (int b = 0; b < game.num_actions(i); ++b) {
        if (b == z[i]) continue;
        std::vector<double> row(kn);  // u_i(b, z_-i, .) - u_i(z, .) <= 0
        for (int an = 0; an < kn; ++an) {
          profile[n - 1] = an;
          profile[i] = b;
          const double dev = game.utility(i, profile);
          profile[i] = z[i];
          row[an] = dev - game.utility(i, profile);
        }
        sys.add_le(std::move(row), 0.0);
      }
    }
    std::vector<double> objective(kn);
    for (int an = 0; an < kn; ++an) {
      profile[n - 1] = an;
      objective[an] = game.utility(n - 1, profile);
    }
    LpResult res = lp_solve(objective, LpDirection::maximize, sys);
    if (res.status == LpStatus::optimal &&
        (!out.optimistic || res.value > out.optimistic->value)) {
      MixedStrategy alpha = normalized_strategy(n - 1, res.point);
      const GameSpec induced = induce_game(game, alpha);
      out.optimistic = StackelbergValue{res.value, std::move(alpha),
                                        detail::learner_point_mass(induced, z), "exact-lp"};
    }
  } while (next_profile(z, learner_counts));

  auto inner = [&](const std::vector<double>& a) -> std::optional<detail::InnerEval> {
    const MixedStrategy alpha{n - 1, a};
    const GameSpec induced = induce_game(game, alpha);
    const std::vector<std::vector<int>> nash = pure_nash_profiles(induced);
    if (nash.empty()) return std::nullopt;
    double worst = 0.0;
    const std::vector<int>* worst_z = nullptr;
    for (const auto& cand : nash) {
      const double v = induced.utilities[n - 1][induced.index_of(cand)];
      if (!worst_z || v < worst) {
        worst = v;
        worst_z = &cand;
      }
    }
    return detail::InnerEval{worst, detail::learner_point_mass(induced, *worst_z)};
  };
  // The optimistic witness admits a pure response by construction, so adding
  // it keeps the pessimistic value defined whenever the optimistic one is.
  std::vector<std::vector<double>> candidates = extra_pessimistic;
  if (out.optimistic) candidates.push_back(out.optimistic->alpha.probs);
  auto best = detail::maximize_over_simplex(kn, grid_resolution, candidates, inner);
  if (best)
    out.pessimistic = StackelbergValue{best->value,
                                       {n - 1, best->alpha},
                                       std::move(best->response),
                                       detail::grid_method(kn, grid_resolution)};
  return out;
}

// All six values with witnesses. Each value's search also evaluates the
// witness commitment of the value below it in the chain
//   v_h <= v_corr <= v_mixed <= v_pure <= V_pure <= V_mixed,
// so the reported numbers respect the chain wherever the inner problems
// nest. The one conditional link is v_mixed <= v_pure: it is guaranteed only
// when the v_mixed witness commitment admits a pure Nash response (the worst
// pure response there is no worse than the worst mixed one, and that
// commitment is a candidate in the pure search). When it does not, the two
// values rank incomparable response sets and either order is legitimate, so
// the chain check skips that link and pure_link_applicable records why.
struct StackelbergReport {
  std::optional<StackelbergValue> pure_optimistic, pure_pessimistic;
  StackelbergValue mixed_optimistic, mixed_pessimistic, correlated, hannan;
  double grid_resolution = kDefaultGridResolution;
  double chain_tolerance = 0.0;
  bool chain_ok = false;
  bool pure_link_applicable = false;
};

inline StackelbergReport compute_stackelberg_report(
    const GameSpec& game, double grid_resolution = kDefaultGridResolution) {
  detail::check_is_full_game(game);
  const int n = game.num_players;

  // The mixed values need Nash enumeration over the learner game; reject
  // oversized games up front instead of after the polytope values are done.
  if (n - 1 > kNashPlayerCap)
    throw unsupported_size_error("too many learners for Nash enumeration");
  for (int i = 0; i < n - 1; ++i)
    if (game.num_actions(i) > kNashActionCap)
      throw unsupported_size_error("a learner exceeds the Nash enumeration action cap");

  StackelbergReport report;
  report.grid_resolution = grid_resolution;
  report.hannan = hannan_stackelberg_value(game, grid_resolution);
  report.correlated =
      correlated_stackelberg_value(game, grid_resolution, {report.hannan.alpha.probs});

  MixedStackelbergValues mixed = mixed_stackelberg_values(
      game, grid_resolution, {}, {report.correlated.alpha.probs});
  report.mixed_pessimistic = std::move(mixed.pessimistic);

  PureStackelbergValues pure = pure_stackelberg_values(
      game, grid_resolution, {report.mixed_pessimistic.alpha.probs});
  report.pure_optimistic = std::move(pure.optimistic);
  report.pure_pessimistic = std::move(pure.pessimistic);

  // The optimistic mixed value must dominate both V_pure and v_mixed, so
  // their witnesses join its candidate set.
  report.mixed_optimistic = std::move(mixed.optimistic);
  std::vector<std::vector<double>> tail = {report.mixed_pessimistic.alpha.probs};
  if (report.pure_optimistic) tail.push_back(report.pure_optimistic->alpha.probs);
  for (const auto& a : tail) {
    std::optional<detail::InnerEval> eval = detail::mixed_inner(game, a, true);
    if (eval && eval->value > report.mixed_optimistic.value)
      report.mixed_optimistic = StackelbergValue{
          eval->value, {n - 1, a}, std::move(eval->response), report.mixed_optimistic.method};
  }

  report.pure_link_applicable =
      !pure_nash_profiles(induce_game(game, report.mixed_pessimistic.alpha)).empty();

  report.chain_tolerance =
      1e-7 + 2.0 * game.utility_sup_norm(n - 1) * grid_resolution;
  const double tol = report.chain_tolerance;
  bool ok = report.hannan.value <= report.correlated.value + tol &&
            report.correlated.value <= report.mixed_pessimistic.value + tol &&
            report.mixed_pessimistic.value <= report.mixed_optimistic.value + tol;
  if (report.pure_optimistic && report.pure_pessimistic) {
    ok = ok && report.pure_pessimistic->value <= report.pure_optimistic->value + tol &&
         report.pure_optimistic->value <= report.mixed_optimistic.value + tol;
    if (report.pure_link_applicable)
      ok = ok && report.mixed_pessimistic.value <= report.pure_pessimistic->value + tol;
  } else if (report.pure_optimistic) {
    ok = ok && report.pure_optimistic->value <= report.mixed_optimistic.value + tol;
  }
  report.chain_ok = ok;
  return report;
}

}  // namespace stacksim
