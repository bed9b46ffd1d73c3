#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "cqnls_test_cli";

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run(const std::string& args) {
  fs::create_directories(kDir);
  const auto out = kDir / "stdout.txt", err = kDir / "stderr.txt";
  const std::string cmd = std::string(CQNLS_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string dir(const std::string& name) { return (kDir / name).string(); }

}  // namespace

TEST_CASE("frequency outside the window is a domain error") {
  const auto r = run("ground-state --omega 0.2 --out " + dir("bad"));
  CHECK(r.code == 2);
  CHECK(r.err.find("(0, 3/16)") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run("").code == 1);
  CHECK(run("ground-state --no-such-flag").code == 1);
  CHECK(run("ground-state --omega abc").code == 1);
  CHECK(run("normalized").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("ground-state writes a profile and a report") {
  const auto r = run("ground-state --omega 0.09375 --out " + dir("gs"));
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir("gs") + "/profile.csv");
  CHECK(csv.find("# command: ground-state") == 0);
  CHECK(csv.find("# config_hash: ") != std::string::npos);
  CHECK(csv.find("# grid_h: 0.015625") != std::string::npos);
  CHECK(csv.find("\nr,Q\n") != std::string::npos);
  CHECK(slurp(dir("gs") + "/report.json").find("\"schema_version\": 1") != std::string::npos);

  // a finer grid lowers the residual
  REQUIRE(run("ground-state --omega 0.09375 --grid-h 0.01 --out " + dir("gs_fine")).code == 0);
  auto residual = [](const std::string& json) {
    const auto at = json.find("\"residual\": ");
    return std::stod(json.substr(at + 12));
  };
  CHECK(residual(slurp(dir("gs_fine") + "/report.json")) < residual(slurp(dir("gs") + "/report.json")));
}

TEST_CASE("identical configuration gives identical bytes") {
  for (const std::string& args : {std::string("ground-state --omega 0.05"),
                                  std::string("evolve --omega 0.1 --eps 0.01 --kind random --seed 4 --time 0.5")}) {
    REQUIRE(run(args + " --out " + dir("det_a")).code == 0);
    REQUIRE(run(args + " --out " + dir("det_b")).code == 0);
    for (const auto& entry : fs::directory_iterator(dir("det_a"))) {
      CAPTURE(entry.path());
      CHECK(slurp(entry.path()) == slurp(fs::path(dir("det_b")) / entry.path().filename()));
    }
    fs::remove_all(dir("det_a"));
    fs::remove_all(dir("det_b"));
  }
}

TEST_CASE("config file sits between flags and defaults") {
  fs::create_directories(kDir);
  {
    std::ofstream cfg(kDir / "run.cfg");
    cfg << "# ground state at a lower frequency\nomega = 0.05\ngrid-h = 0.03125\n";
  }
  const std::string cfg = (kDir / "run.cfg").string();
  REQUIRE(run("ground-state --config " + cfg + " --out " + dir("cfg_a")).code == 0);
  const std::string a = slurp(dir("cfg_a") + "/profile.csv");
  CHECK(a.find("# omega: 0.05\n") != std::string::npos);
  CHECK(a.find("# grid_h: 0.03125\n") != std::string::npos);

  REQUIRE(run("ground-state --config " + cfg + " --omega 0.1 --out " + dir("cfg_b")).code == 0);
  const std::string b = slurp(dir("cfg_b") + "/profile.csv");
  CHECK(b.find("# omega: 0.1\n") != std::string::npos);
  CHECK(b.find("# grid_h: 0.03125\n") != std::string::npos);

  // the config hash tracks the resolved values, not where they came from
  REQUIRE(run("ground-state --omega 0.05 --grid-h 0.03125 --out " + dir("cfg_c")).code == 0);
  CHECK(slurp(dir("cfg_a") + "/report.json") == slurp(dir("cfg_c") + "/report.json"));

  {
    std::ofstream bad(kDir / "bad.cfg");
    bad << "omega 0.05\n";
  }
  CHECK(run("ground-state --config " + (kDir / "bad.cfg").string()).code == 1);
  CHECK(run("ground-state --config /nonexistent.cfg").code == 1);
}

TEST_CASE("spectrum and evolve run end to end") {
  REQUIRE(run("spectrum --omega 0.05 --modes 2 --out " + dir("sp")).code == 0);
  CHECK(fs::exists(dir("sp") + "/spectrum.csv"));
  CHECK(fs::exists(dir("sp") + "/mode_lplus.csv"));
  const auto e = run("evolve --omega 0.1 --time 0.2 --svg --out " + dir("ev"));
  REQUIRE(e.code == 0);
  CHECK(fs::exists(dir("ev") + "/trajectory.csv"));
  CHECK(fs::exists(dir("ev") + "/distance.svg"));
  CHECK(run("evolve --eps 0.5 --out " + dir("ev_bad")).code == 2);
  CHECK(run("evolve --kind sideways --out " + dir("ev_bad")).code == 2);
}

TEST_CASE("curve-based commands") {
  // a short curve keeps this test fast; the full 128-sample runs live in the acceptance binary
  const std::string curve = " --samples 48";
  auto c = run("classify --omega 0.0128" + curve + " --out " + dir("cl"));
  REQUIRE(c.code == 0);
  CHECK(c.out.rfind("Unstable\n", 0) == 0);
  c = run("classify --omega 0.1" + curve + " --out " + dir("cl2"));
  REQUIRE(c.code == 0);
  CHECK(c.out.rfind("Stable\n", 0) == 0);

  const auto n = run("normalized --mass 378.92" + curve + " --out " + dir("nm"));
  REQUIRE(n.code == 0);
  CHECK(n.out.rfind("2 solution(s)\n", 0) == 0);
  CHECK(run("normalized --mass 90" + curve + " --out " + dir("nm0")).out.rfind("0 solution(s)", 0) == 0);

  const auto k = run("constants" + curve + " --out " + dir("k"));
  REQUIRE(k.code == 0);
  CHECK(k.out.find("\"rho\"") != std::string::npos);
  CHECK(k.out.find("\"omega_zero_energy\"") != std::string::npos);

  CHECK(run("constants --omega-min 0.04 --samples 16 --out " + dir("k_bad")).code == 2);
}
