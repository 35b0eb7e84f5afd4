// Acceptance gate: one line per criterion, PASS only when every pinned
// tolerance and runtime budget holds. Exit code 0 iff all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <stacksim/builtin_games.hpp>
#include <stacksim/equilibria.hpp>
#include <stacksim/experiments.hpp>
#include <stacksim/io.hpp>
#include <stacksim/learners.hpp>
#include <stacksim/simulation.hpp>

using namespace stacksim;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GameSpec random_small_game(std::uint64_t seed, const std::vector<int>& shape, double lo,
                           double hi) {
  static const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
  const int n = static_cast<int>(shape.size());
  std::vector<std::vector<std::string>> labels(n);
  std::int64_t cells = 1;
  for (int i = 0; i < n; ++i) {
    labels[i].assign(alphabet.begin(), alphabet.begin() + shape[i]);
    cells *= shape[i];
  }
  std::vector<std::vector<double>> utilities(n, std::vector<double>(cells));
  const std::uint64_t stream = rng::stream_seed(seed, 0);
  std::int64_t t = 0;
  for (int i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < cells; ++j)
      utilities[i][j] = lo + (hi - lo) * rng::unit_draw(stream, t++);
  return make_game(labels, utilities);
}

// ---- criterion 1: the locking pair and the optimistic pure value ----------

Criterion criterion_1() {
  Criterion c;
  const auto start = Clock::now();

  const CounterexampleResult r = run_counterexample("ce1", 1000);
  bool locked = true;
  for (int t = 0; t < 1000; ++t)
    if (r.traj.profile(t) != std::vector<int>{0, 0, 0}) locked = false;
  c.check(locked, "trajectory leaves (T,L,E)");
  c.check(r.cumulative == 0.0, "cumulative payoff is " + std::to_string(r.cumulative));
  c.check(std::abs(r.reference_value - 1.0) <= 1e-9,
          "optimistic pure value is " + std::to_string(r.reference_value));

  const double elapsed = seconds_since(start);
  c.check(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  return c;
}

// ---- criterion 2: the cycling pair, its regret trace, and v_mixed ---------

Criterion criterion_2() {
  Criterion c;
  const auto start = Clock::now();

  const int rounds = 3000;
  const CounterexampleResult r = run_counterexample("ce2", rounds);
  const std::vector<std::vector<int>> cycle = {{0, 0, 0}, {1, 1, 0}, {1, 0, 0}};
  bool cycling = true;
  for (int t = 0; t < rounds; ++t)
    if (r.traj.profile(t) != cycle[t % 3]) cycling = false;
  c.check(cycling, "trajectory leaves the 3-cycle");
  c.check(r.average == -1.0 / 3, "average payoff is " + std::to_string(r.average));
  c.check(std::abs(r.reference_value) <= 1e-6,
          "pessimistic mixed value is " + std::to_string(r.reference_value));

  // hand-computed regret table after rounds 1..3, exact in every entry
  const GameSpec ce2 = counterexample_two();
  InternalRegretState p1 = InternalRegretState::zero(0, 2);
  InternalRegretState p2 = InternalRegretState::zero(1, 2);

  p1 = update_internal_regret(p1, ce2, cycle[0]);
  p2 = update_internal_regret(p2, ce2, cycle[0]);
  c.check(p1.regret_matrix[0][1] == -1.0 && p1.regret_matrix[1][0] == 0.0, "round 1 trace (p1)");
  c.check(p2.regret_matrix[0][1] == -1.0 && p2.regret_matrix[1][0] == 0.0, "round 1 trace (p2)");

  p1 = update_internal_regret(p1, ce2, cycle[1]);
  p2 = update_internal_regret(p2, ce2, cycle[1]);
  c.check(p1.regret_matrix[0][1] == -0.5 && p1.regret_matrix[1][0] == -0.5, "round 2 trace (p1)");
  c.check(p2.regret_matrix[0][1] == -0.5 && p2.regret_matrix[1][0] == -0.5, "round 2 trace (p2)");

  p1 = update_internal_regret(p1, ce2, cycle[2]);
  p2 = update_internal_regret(p2, ce2, cycle[2]);
  c.check(p1.regret_matrix[0][1] == -1.0 / 3 && p1.regret_matrix[1][0] == 0.0,
          "round 3 trace (p1)");
  c.check(p2.regret_matrix[0][1] == 0.0 && p2.regret_matrix[1][0] == -1.0 / 3,
          "round 3 trace (p2)");

  const double elapsed = seconds_since(start);
  c.check(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  return c;
}

// ---- criterion 3: v_corr by LP against a dumb lattice scan ----------------

Criterion criterion_3() {
  Criterion c;
  const auto start = Clock::now();

  const GameSpec ce2 = counterexample_two();
  const StackelbergValue v = correlated_stackelberg_value(ce2);
  c.check(std::abs(v.value - (-1.0 / 3)) <= 1e-6, "LP value is " + std::to_string(v.value));

  // swap constraints of the induced two-player game with integer payoffs,
  // evaluated in exact integer arithmetic on the step-1e-3 lattice
  const GameSpec induced = induce_game(ce2, MixedStrategy::point_mass(2, 1, 0));
  long long gain[2][2][2][4];  // player, from, to, cell coefficient
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int cell = 0; cell < 4; ++cell) {
          std::vector<int> profile = induced.profile_of(cell);
          if (profile[i] != a) {
            gain[i][a][b][cell] = 0;
            continue;
          }
          std::vector<int> swapped = profile;
          swapped[i] = b;
          gain[i][a][b][cell] = static_cast<long long>(
              std::llround(induced.utility(i, swapped) - induced.utility(i, profile)));
        }
  long long obj[4];
  for (int cell = 0; cell < 4; ++cell)
    obj[cell] = static_cast<long long>(std::llround(induced.utilities[2][cell]));

  const int S = 1000;
  long long best_num = std::numeric_limits<long long>::max();
  for (int i = 0; i <= S; ++i)
    for (int j = 0; i + j <= S; ++j)
      for (int k = 0; i + j + k <= S; ++k) {
        const long long phi[4] = {i, j, k, static_cast<long long>(S - i - j - k)};
        bool ok = true;
        for (int pl = 0; pl < 2 && ok; ++pl)
          for (int a = 0; a < 2 && ok; ++a)
            for (int b = 0; b < 2 && ok; ++b) {
              if (a == b) continue;
              long long g = 0;
              for (int cell = 0; cell < 4; ++cell) g += gain[pl][a][b][cell] * phi[cell];
              if (g > 0) ok = false;
            }
        if (!ok) continue;
        long long val = 0;
        for (int cell = 0; cell < 4; ++cell) val += obj[cell] * phi[cell];
        best_num = std::min(best_num, val);
      }
  const double grid_min = static_cast<double>(best_num) / S;
  c.check(std::abs(grid_min - v.value) <= 2e-3, "grid minimum " + std::to_string(grid_min) +
                                                    " vs LP " + std::to_string(v.value));

  const double elapsed = seconds_since(start);
  c.check(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  return c;
}

// ---- criteria 4 and 5: guarantee proxies over twenty seeds ----------------

struct GuaranteePair {
  Criterion mean;  // criterion 4
  Criterion min;   // criterion 5
};

GuaranteePair criteria_4_5() {
  GuaranteePair out;
  const auto start = Clock::now();

  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const GuaranteeReport report = verify_guarantee(
      counterexample_two(), LearnerKind::internal_regret_matching, 100000, seeds, 0.05);

  out.mean.check(std::abs(report.value - (-1.0 / 3)) <= 1e-6,
                 "reference value is " + std::to_string(report.value));
  out.mean.check(report.mean_pass, "mean " + std::to_string(report.mean_avg) + " under " +
                                       std::to_string(report.value - 0.05));

  out.min.check(report.min_avg >= report.value - 0.08,
                "min " + std::to_string(report.min_avg) + " under " +
                    std::to_string(report.value - 0.08));

  const double elapsed = seconds_since(start);
  out.mean.check(elapsed < 120.0, "took " + std::to_string(elapsed) + " s");
  return out;
}

// ---- criterion 6: empirical distributions approach their polytopes --------

Criterion criterion_6() {
  Criterion c;
  const auto start = Clock::now();

  std::vector<std::pair<std::string, GameSpec>> games;
  games.emplace_back("ce2", counterexample_two());
  for (std::uint64_t seed : {301, 302, 303})
    games.emplace_back("random-" + std::to_string(seed),
                       random_small_game(seed, {2, 2, 2}, 0.0, 1.0));

  for (const auto& [name, game] : games) {
    const int kn = game.num_actions(2);
    const MixedStrategy alpha =
        kn == 1 ? MixedStrategy::point_mass(2, 1, 0) : MixedStrategy::uniform(2, kn);
    const OptimizerPolicy opt = OptimizerPolicy::fixed(alpha);

    for (bool internal : {true, false}) {
      const LearnerPolicy policy{internal ? LearnerKind::internal_regret_matching
                                          : LearnerKind::external_regret_matching,
                                 TieBreak::repeat_previous, std::nullopt};
      const SetKind target = internal ? SetKind::ced : SetKind::hannan;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Trajectory traj = run(game, opt, {policy, policy}, 100000, seed);
        const JointDistribution dist = empirical_distribution(traj, {0, 1});
        const double d = l1_distance_to_set(dist, game, alpha, target).distance;
        if (d > 0.05) {
          c.check(false, name + " seed " + std::to_string(seed) + (internal ? " ced " : " hannan ") +
                             std::to_string(d));
          break;  // one witness per game and class keeps the line readable
        }
      }
    }
  }

  const double elapsed = seconds_since(start);
  c.check(elapsed < 180.0, "took " + std::to_string(elapsed) + " s");
  return c;
}

// ---- criterion 7: the value chain on random games --------------------------

Criterion criterion_7() {
  Criterion c;
  const double tol = 0.02;

  for (std::uint64_t seed = 401; seed <= 450; ++seed) {
    const GameSpec g = random_small_game(seed, {2, 2, 2}, -1.0, 1.0);
    const StackelbergReport r = compute_stackelberg_report(g);
    const std::string tag = "game " + std::to_string(seed) + ": ";

    c.check(r.hannan.value <= r.correlated.value + tol, tag + "v_h > v_corr");
    c.check(r.correlated.value <= r.mixed_pessimistic.value + tol, tag + "v_corr > v_mixed");
    c.check(r.mixed_pessimistic.value <= r.mixed_optimistic.value + tol,
            tag + "v_mixed > V_mixed");
    if (r.pure_pessimistic) {
      if (r.pure_link_applicable)
        c.check(r.mixed_pessimistic.value <= r.pure_pessimistic->value + tol,
                tag + "v_mixed > v_pure");
      c.check(r.pure_pessimistic->value <= r.pure_optimistic->value + tol,
              tag + "v_pure > V_pure");
      c.check(r.pure_optimistic->value <= r.mixed_optimistic.value + tol,
              tag + "V_pure > V_mixed");
    }
    if (!c.pass) break;
  }

  const std::vector<std::vector<int>> shapes = {{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 2}};
  for (std::uint64_t seed = 501; seed <= 520; ++seed) {
    const GameSpec g =
        random_small_game(seed, shapes[static_cast<std::size_t>(seed - 501) % shapes.size()],
                          -1.0, 1.0);
    const StackelbergReport r = compute_stackelberg_report(g);
    const std::string tag = "pair " + std::to_string(seed) + ": ";

    c.check(r.pure_optimistic.has_value() && r.pure_pessimistic.has_value(),
            tag + "pure values missing");
    if (!r.pure_optimistic || !r.pure_pessimistic) break;
    c.check(std::abs(r.pure_optimistic->value - r.mixed_optimistic.value) <= tol,
            tag + "optimistic split " + std::to_string(r.pure_optimistic->value) + " vs " +
                std::to_string(r.mixed_optimistic.value));
    c.check(std::abs(r.pure_pessimistic->value - r.mixed_pessimistic.value) <= tol,
            tag + "pessimistic split " + std::to_string(r.pure_pessimistic->value) + " vs " +
                std::to_string(r.mixed_pessimistic.value));
    if (!c.pass) break;
  }
  return c;
}

// ---- criterion 8: sampling drift of the committed mix ----------------------

Criterion criterion_8() {
  Criterion c;

  const GameSpec game = random_small_game(601, {2, 2, 2}, 0.0, 1.0);
  const MixedStrategy alpha = MixedStrategy::uniform(2, 2);
  const LearnerPolicy policy{LearnerKind::internal_regret_matching, TieBreak::repeat_previous,
                             std::nullopt};

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Trajectory traj =
        run(game, OptimizerPolicy::fixed(alpha), {policy, policy}, 100000, seed);
    for (int player = 0; player < 3; ++player) {
      const double drift = check_slln_drift(traj, alpha, player);
      if (std::abs(drift) > 0.02) {
        c.check(false, "seed " + std::to_string(seed) + " player " + std::to_string(player + 1) +
                           " drift " + std::to_string(drift));
      }
    }
    if (!c.pass) break;
  }
  return c;
}

// ---- criterion 9: byte-identical replays through the installed binary ------

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Criterion criterion_9() {
  Criterion c;

  const std::string cfg_path = "acceptance_sim.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "game ce2\nmode simulate\n"
        << "learner internal-regret-matching tie_break=repeat-previous\n"
        << "optimizer fixed-mixed 1\nrounds 2000\nseeds 11 12 13\n"
        << "checkpoints 10 100 1000 2000\noutput acceptance_sim.csv\n";
  }

  std::string csv[2], traj[2];
  for (int pass = 0; pass < 2; ++pass) {
    std::remove("acceptance_sim.csv");
    std::remove("acceptance_traj.txt");
    const std::string base = std::string(STACKSIM_CLI_PATH);
    int rc = std::system((base + " simulate " + cfg_path + " > /dev/null 2>&1").c_str());
    c.check(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "simulate exited nonzero");
    rc = std::system(
        (base + " counterexample ce2 --rounds 2000 --trajectory acceptance_traj.txt > /dev/null 2>&1")
            .c_str());
    c.check(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "counterexample exited nonzero");
    csv[pass] = slurp("acceptance_sim.csv");
    traj[pass] = slurp("acceptance_traj.txt");
  }

  c.check(!csv[0].empty(), "csv output missing");
  c.check(csv[0] == csv[1], "csv bytes differ between runs");
  c.check(!traj[0].empty(), "trajectory output missing");
  c.check(traj[0] == traj[1], "trajectory bytes differ between runs");

  c.check(std::hash<std::string>{}(csv[0]) == std::hash<std::string>{}(csv[1]),
          "csv hashes differ");
  return c;
}

}  // namespace

int main() {
  std::vector<std::pair<int, Criterion>> results;

  const auto t0 = Clock::now();
  results.emplace_back(1, criterion_1());
  results.emplace_back(2, criterion_2());
  results.emplace_back(3, criterion_3());
  GuaranteePair guarantee = criteria_4_5();
  results.emplace_back(4, guarantee.mean);
  results.emplace_back(5, guarantee.min);
  results.emplace_back(6, criterion_6());
  results.emplace_back(7, criterion_7());
  results.emplace_back(8, criterion_8());
  results.emplace_back(9, criterion_9());

  bool all = true;
  for (const auto& [index, criterion] : results) {
    if (criterion.pass) {
      std::cout << "ACCEPTANCE " << index << ": PASS\n";
    } else {
      std::cout << "ACCEPTANCE " << index << ": FAIL (" << criterion.detail << ")\n";
      all = false;
    }
  }
  std::cout << "total " << seconds_since(t0) << " s\n";
  return all ? 0 : 1;
}
