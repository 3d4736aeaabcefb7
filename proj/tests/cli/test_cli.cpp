#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto p = fs::path(PHASEFLOW_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const auto err = dir / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + PHASEFLOW_CLI + "' " + args + " > '" +
                          (dir / "stdout.txt").string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const auto d = scratch("usage");
  const std::string out = " --out '" + (d / "o").string() + "'";
  CHECK(run("profile --k 0" + out, d).code == 2);
  CHECK(run("profile --bogus 1" + out, d).code == 2);
  CHECK(run("profile --T 4,2,8" + out, d).code == 2);
  CHECK(run("interp --k 2 --ell 2 --adversarial" + out, d).code == 2);
  CHECK(run("", d).code == 2);
  {
    std::ofstream cfg(d / "bad.json");
    cfg << R"({"k": 1, "colour": "red"})";
  }
  const auto r = run("profile --config '" + (d / "bad.json").string() + "'" + out, d);
  CHECK(r.code == 2);
  CHECK(r.err.find("colour") != std::string::npos);
  CHECK(run("--version", d).code == 0);
  CHECK(run("profile --help", d).code == 0);
}

TEST_CASE("I/O errors exit with 3") {
  const auto d = scratch("io");
  const std::string out = " --out '" + (d / "o").string() + "'";
  CHECK(run("profile --config /nonexistent/cfg.json" + out, d).code == 3);
  const auto r = run("check-well --well /nonexistent/w.csv" + out, d);
  CHECK(r.code == 3);
  CHECK(r.err.find("/nonexistent/w.csv") != std::string::npos);
}

TEST_CASE("flags override the config file and the effective config is echoed") {
  const auto d = scratch("precedence");
  {
    std::ofstream cfg(d / "cfg.json");
    cfg << R"({"k": 2, "T": [2, 4, 8], "seed": 7})";
  }
  const auto o = d / "o";
  const auto r = run("profile --config '" + (d / "cfg.json").string() + "' --k 1 --out '" + o.string() + "'", d);
  CHECK(r.code == 0);
  const auto echo = slurp(o / "config.echo.json");
  CHECK(echo.find("\"k\": 1") != std::string::npos);
  CHECK(echo.find("\"seed\": 7") != std::string::npos);
  CHECK(echo.find("\"subcommand\": \"profile\"") != std::string::npos);

  // the echo is itself a valid config
  const auto o2 = d / "o2";
  CHECK(run("profile --config '" + (o / "config.echo.json").string() + "' --out '" + o2.string() + "'", d).code == 0);
  CHECK(slurp(o / "m_table.csv") == slurp(o2 / "m_table.csv"));
}

TEST_CASE("outputs carry the header line and RFC-4180 layout") {
  const auto d = scratch("headers");
  const auto o = d / "o";
  REQUIRE(run("profile --k 1 --T 2,4,8 --seed 5 --out '" + o.string() + "'", d).code == 0);
  const auto table = slurp(o / "m_table.csv");
  CHECK(first_line(table).rfind("# phaseflow ", 0) == 0);
  CHECK(first_line(table).find("seed=5") != std::string::npos);
  CHECK(first_line(table).find("config=") != std::string::npos);
  CHECK(table.find("\r\nT,m\r\n") != std::string::npos);
  CHECK(slurp(o / "profile.csv").find("\r\nt,u\r\n") != std::string::npos);
  const auto meta = slurp(o / "profile.json");
  CHECK(meta.find("\"config_hash\"") != std::string::npos);
  CHECK(meta.find("\"m_hat\"") != std::string::npos);
}

TEST_CASE("cache reuse is byte-identical and skips the solver") {
  const auto d = scratch("cache");
  const auto o = d / "o";
  const std::string args = "profile --k 2 --T 2,4,8 --out '" + o.string() + "'";
  const auto first = run(args, d);
  REQUIRE(first.code == 0);
  const auto table = slurp(o / "m_table.csv");
  const auto field = slurp(o / "profile.csv");
  fs::remove(o / "m_table.csv");
  const auto second = run(args, d);
  CHECK(second.code == 0);
  CHECK(second.err.find("cache hit") != std::string::npos);
  CHECK(slurp(o / "m_table.csv") == table);

  const auto third = run(args + " --cache recompute", d);
  CHECK(third.code == 0);
  CHECK(third.err.find("cache hit") == std::string::npos);
  CHECK(slurp(o / "m_table.csv") == table);
  CHECK(slurp(o / "profile.csv") == field);
}

TEST_CASE("thread count does not change the results") {
  const auto d = scratch("threads");
  const auto a = d / "a", b = d / "b";
  const std::string base = "cell --k 1 --eps 0.2 --angles 3 --starts 0 --cache recompute";
  REQUIRE(run(base + " --threads 1 --out '" + a.string() + "'", d).code == 0);
  REQUIRE(run(base + " --out '" + b.string() + "'", d, "PHASEFLOW_THREADS=3").code == 0);
  CHECK(slurp(a / "cell_table.csv") == slurp(b / "cell_table.csv"));
  CHECK(slurp(a / "cell_polar.csv") == slurp(b / "cell_polar.csv"));
  CHECK(run(base + " --out '" + b.string() + "'", d, "PHASEFLOW_THREADS=many").code == 2);
}

TEST_CASE("two-dimensional gamma needs a g table") {
  const auto d = scratch("gamma2d");
  const auto r = run("gamma --dim 2 --k 1 --eps 0.2,0.1 --out '" + (d / "o").string() + "'", d);
  CHECK(r.code == 1);
  CHECK(r.err.find("g table missing") != std::string::npos);
}

TEST_CASE("cell then gamma in the same directory") {
  const auto d = scratch("cell-gamma");
  const auto o = d / "o";
  REQUIRE(run("cell --k 1 --eps 0.2,0.1 --angles 4 --starts 0 --out '" + o.string() + "'", d).code == 0);
  CHECK(slurp(o / "cell_polar.csv").find("\r\nangle,g_final\r\n") != std::string::npos);
  CHECK(slurp(o / "cell_table.csv").find("\r\nangle,epsilon,g\r\n") != std::string::npos);
  const auto r = run("gamma --dim 2 --k 1 --eps 0.2,0.1 --nu 90deg --out '" + o.string() + "'", d);
  CHECK(r.code <= 1);
  CHECK(slurp(o / "gamma.csv").find("\r\nepsilon,energy,recovery_energy,l2dist,transitions\r\n") != std::string::npos);
}

TEST_CASE("adversarial interpolation run emits the threshold and maximizer") {
  const auto d = scratch("interp");
  const auto o = d / "o";
  REQUIRE(run("interp --k 2 --ell 1 --adversarial --family fourier --budget 100 --out '" + o.string() + "'", d).code ==
          0);
  const auto j = slurp(o / "interp.json");
  for (const char* key : {"\"q_hat\"", "\"ell\"", "\"k\"", "\"q\"", "\"lhs\"", "\"rhs\"", "\"ratio\"", "\"pass\""})
    CHECK(j.find(key) != std::string::npos);
  CHECK(slurp(o / "interp_maximizer.csv").find("\r\nt,u\r\n") != std::string::npos);
}

TEST_CASE("norms and check-well") {
  const auto d = scratch("misc");
  const auto o = d / "o";
  CHECK(run("norms --d 2 --ell 2 --norm operatorial --tensor 0.3,-1.1,2.0 --out '" + o.string() + "'", d).code == 0);
  CHECK(slurp(o / "norms.json").find("\"c_low\"") != std::string::npos);
  CHECK(run("check-well --out '" + o.string() + "'", d).code == 0);
  CHECK(slurp(o / "well.csv").find("\r\ns,w\r\n") != std::string::npos);
  {
    std::ofstream w(d / "flat.csv");
    w << "s,w\n-2,0.09\n-1,0\n0,0.01\n1,0\n2,0.09\n";
  }
  CHECK(run("check-well --well '" + (d / "flat.csv").string() + "' --out '" + o.string() + "'", d).code == 1);
}
