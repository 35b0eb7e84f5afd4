#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(STACKSIM_CLI_PATH) + " " + args + " > cli_out.txt 2> cli_err.txt";
  const int rc = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = slurp("cli_out.txt");
  result.err = slurp("cli_err.txt");
  return result;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("values subcommand prints the hierarchy for the builtins") {
  const CliResult ce1 = run_cli("values ce1");
  REQUIRE(ce1.exit_code == 0);
  REQUIRE(contains(ce1.out, "V_pure  = 1"));
  REQUIRE(contains(ce1.out, "v_corr  = 0"));
  REQUIRE(contains(ce1.out, "chain v_h <= v_corr <= v_mixed <= v_pure <= V_pure <= V_mixed: OK"));

  const CliResult ce2 = run_cli("values ce2 --grid 25");
  REQUIRE(ce2.exit_code == 0);
  REQUIRE(contains(ce2.out, "v_corr  = -0.333333333333"));
  REQUIRE(contains(ce2.out, "v_h     = -0.333333333333"));
  REQUIRE(contains(ce2.out, ": OK"));
}

TEST_CASE("counterexample subcommand replays the golden traces") {
  const CliResult lock = run_cli("counterexample ce1 --rounds 5");
  REQUIRE(lock.exit_code == 0);
  REQUIRE(contains(lock.out, "5 T L E"));
  REQUIRE(contains(lock.out, "cumulative optimizer utility 0"));
  REQUIRE(contains(lock.out, "avg 0 < V_pure 1"));

  const CliResult cycle = run_cli("counterexample ce2 --rounds 9");
  REQUIRE(cycle.exit_code == 0);
  REQUIRE(contains(cycle.out, "9 B L E"));
  REQUIRE(contains(cycle.out, "avg -0.333333 < v_mixed 0"));

  // a single round is all (T, L): the average ties the reference value
  const CliResult one = run_cli("counterexample ce2 --rounds 1");
  REQUIRE(one.exit_code == 0);
  REQUIRE(contains(one.out, "1 T L E"));
  REQUIRE(contains(one.out, "avg 0 = v_mixed 0"));
}

TEST_CASE("counterexample side files carry the trajectory and metrics") {
  std::remove("cli_traj.txt");
  std::remove("cli_metrics.csv");
  const CliResult r =
      run_cli("counterexample ce2 --rounds 10 --trajectory cli_traj.txt --metrics cli_metrics.csv");
  REQUIRE(r.exit_code == 0);

  const std::string traj = slurp("cli_traj.txt");
  REQUIRE(contains(traj, "1 T L E"));
  REQUIRE(contains(traj, "10 T L E"));

  const std::string csv = slurp("cli_metrics.csv");
  REQUIRE(contains(csv, "seed,t,avg_opt_payoff,dist_ced,dist_hannan,"
                        "ext_regret_p1,ext_regret_p2,int_regret_p1,int_regret_p2"));
  REQUIRE(contains(csv, "\n0,10,"));
}

TEST_CASE("simulate subcommand writes a deterministic csv") {
  spit("cli_sim.cfg",
       "game ce2\n"
       "mode simulate\n"
       "learner internal-regret-matching tie_break=repeat-previous\n"
       "optimizer fixed-mixed 1\n"
       "rounds 100\n"
       "seeds 1 2\n"
       "checkpoints 10 100\n"
       "output cli_sim.csv\n");

  std::remove("cli_sim.csv");
  const CliResult first = run_cli("simulate cli_sim.cfg");
  REQUIRE(first.exit_code == 0);
  const std::string csv1 = slurp("cli_sim.csv");
  REQUIRE(contains(csv1, "seed,t,avg_opt_payoff"));
  REQUIRE(contains(csv1, "\n1,10,"));
  REQUIRE(contains(csv1, "\n2,100,"));

  const CliResult second = run_cli("simulate cli_sim.cfg");
  REQUIRE(second.exit_code == 0);
  REQUIRE(slurp("cli_sim.csv") == csv1);  // same seeds, same bytes
}

TEST_CASE("simulate without an output directive streams to stdout") {
  spit("cli_sim_stdout.cfg",
       "game ce2\n"
       "mode simulate\n"
       "learner internal-regret-matching\n"
       "optimizer fixed-mixed 1\n"
       "rounds 20\n"
       "seeds 5\n");
  const CliResult r = run_cli("simulate cli_sim_stdout.cfg");
  REQUIRE(r.exit_code == 0);
  REQUIRE(contains(r.out, "seed,t,avg_opt_payoff"));
  REQUIRE(contains(r.out, "\n5,20,"));  // default checkpoints end at the horizon
}

TEST_CASE("guarantee subcommand reports both proxies") {
  spit("cli_guar.cfg",
       "game ce2\n"
       "mode guarantee\n"
       "learner internal-regret-matching\n"
       "rounds 500\n"
       "seeds 1 2 3\n"
       "epsilon 0.25\n");
  const CliResult r = run_cli("guarantee cli_guar.cfg");
  REQUIRE(r.exit_code == 0);
  REQUIRE(contains(r.out, "guarantee target v_corr = -0.333333333333"));
  REQUIRE(contains(r.out, "mean over seeds"));
  REQUIRE(contains(r.out, "min over seeds"));
  REQUIRE(contains(r.out, "expected-value proxy"));
  REQUIRE(contains(r.out, "almost-sure proxy"));
}

TEST_CASE("user mistakes exit with code one") {
  REQUIRE(run_cli("simulate missing.cfg").exit_code == 1);
  REQUIRE(run_cli("values /nonexistent/game.txt").exit_code == 1);
  REQUIRE(run_cli("warp ce1").exit_code == 1);
  REQUIRE(run_cli("").exit_code == 1);
  REQUIRE(run_cli("counterexample ce3 --rounds 5").exit_code == 1);
  REQUIRE(run_cli("counterexample ce1 --rounds 0").exit_code == 1);

  spit("cli_bad.cfg", "game ce2\nmode simulate\nrounds 10\n");
  REQUIRE(run_cli("simulate cli_bad.cfg").exit_code == 1);

  spit("cli_bad2.cfg", "game ce2\nmode guarantee\nlebensraum 3\n");
  REQUIRE(run_cli("guarantee cli_bad2.cfg").exit_code == 1);

  // config mode must match the subcommand
  spit("cli_mismatch.cfg",
       "game ce2\nmode guarantee\nlearner internal-regret-matching\n"
       "rounds 10\nseeds 1\nepsilon 0.1\n");
  REQUIRE(run_cli("simulate cli_mismatch.cfg").exit_code == 1);
}

TEST_CASE("capability limits exit with code two") {
  std::string big = "players 3\nactions a b c d e\nactions a b c d e\nactions x\n";
  for (int i = 0; i < 3; ++i) {
    big += "utilities";
    for (int j = 0; j < 25; ++j) big += " 0";
    big += "\n";
  }
  spit("cli_big.game", big);
  const CliResult r = run_cli("values cli_big.game");
  REQUIRE(r.exit_code == 2);
  REQUIRE(contains(r.err, "error:"));
}

TEST_CASE("help requests exit cleanly") {
  REQUIRE(run_cli("--help").exit_code == 0);
  REQUIRE(run_cli("values --help").exit_code == 0);
}
