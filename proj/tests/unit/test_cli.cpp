#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fbve/config.hpp"
#include "fbve/reports.hpp"

namespace fs = std::filesystem;
using fbve::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fbve_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
  const auto path = (dir / "run.toml").string();
  std::ofstream(path) << body;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmall =
    "[grid]\nn1 = 16\nn2 = 9\n[run]\nt_end = 0.05\ninitial = \"perturbed\"\namplitude = 0.01\n"
    "[diagnostics]\nevery = 5\n";

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({}).code == fbve::cli::kUsage);
  CHECK(invoke({"frobnicate"}).code == fbve::cli::kUsage);
  CHECK(invoke({"simulate"}).code == fbve::cli::kUsage);
  CHECK(invoke({"simulate", "x.toml", "--threads", "0"}).code == fbve::cli::kUsage);
  CHECK(invoke({"--help"}).code == fbve::cli::kSuccess);
  CHECK(invoke({"--version"}).out.find(fbve::io::version_string()) != std::string::npos);
}

TEST_CASE("bad config or input exits 2") {
  const auto dir = workdir("config");
  const auto bad = write_config(dir, "[grid]\nn1 = 16\nn2 = 9\nbogus = 1\n");
  const auto r = invoke({"simulate", bad, "--output-dir", dir.string()});
  CHECK(r.code == fbve::cli::kConfig);
  CHECK(r.err.find("grid.bogus") != std::string::npos);
  CHECK(invoke({"simulate", (dir / "missing.toml").string()}).code == fbve::cli::kConfig);

  std::ofstream(dir / "junk.fbvs") << "not a snapshot";
  CHECK(invoke({"identities", (dir / "junk.fbvs").string()}).code == fbve::cli::kConfig);
}

TEST_CASE("equilibrium simulate reports zero drift and writes artifacts") {
  const auto dir = workdir("eq");
  const auto cfg = write_config(dir, "[grid]\nn1 = 16\nn2 = 9\n[run]\nt_end = 0.1\ninitial = \"equilibrium\"\n");
  const auto r = invoke({"simulate", cfg, "--output-dir", dir.string()});
  REQUIRE(r.code == fbve::cli::kSuccess);
  CHECK(r.out.find("[grid]") != std::string::npos);
  CHECK(r.out.find("drift = 0\n") != std::string::npos);
  for (const char* f : {"diagnostics.csv", "initial.fbvs", "final.fbvs", "manifest.json"})
    CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "manifest.json").find("\"exit_status\": 0") != std::string::npos);

  const auto id = invoke({"identities", (dir / "final.fbvs").string()});
  CHECK(id.code == fbve::cli::kSuccess);
  CHECK(id.out.find("piola_interior,0") != std::string::npos);
  const auto dg = invoke({"diagnose", (dir / "final.fbvs").string()});
  CHECK(dg.code == fbve::cli::kSuccess);
  CHECK(dg.out.find("basic_energy") != std::string::npos);
}

TEST_CASE("a manifest reproduces its run") {
  const auto a = workdir("repro_a");
  const auto b = workdir("repro_b");
  REQUIRE(invoke({"simulate", write_config(a, kSmall), "--output-dir", a.string()}).code == 0);
  REQUIRE(invoke({"simulate", (a / "manifest.json").string(), "--output-dir", b.string()}).code == 0);
  CHECK(slurp(a / "final.fbvs") == slurp(b / "final.fbvs"));
  CHECK(slurp(a / "diagnostics.csv") == slurp(b / "diagnostics.csv"));
}

TEST_CASE("an aborted run exits 3 and records the violation") {
  const auto dir = workdir("abort");
  const auto cfg = write_config(dir,
      "[grid]\nn1 = 16\nn2 = 9\n[run]\nt_end = 0.05\ninitial = \"perturbed\"\namplitude = 0.01\n"
      "piola_tolerance = 1e-30\n");
  const auto r = invoke({"simulate", cfg, "--output-dir", dir.string()});
  CHECK(r.code == fbve::cli::kAborted);
  CHECK(r.err.find("Piola") != std::string::npos);
  const std::string man = slurp(dir / "manifest.json");
  CHECK(man.find("\"violation\"") != std::string::npos);
  CHECK(man.find("\"exit_status\": 3") != std::string::npos);
}

TEST_CASE("strict warnings and failed verdicts exit 4") {
  const auto dir = workdir("strict");
  const auto cfg = write_config(dir, std::string(kSmall) + "trace_ratio_limit = 1e-9\n");
  const auto lax = invoke({"simulate", cfg, "--output-dir", dir.string()});
  CHECK(lax.code == fbve::cli::kSuccess);
  CHECK(lax.err.find("warning: trace ratio") != std::string::npos);
  CHECK(invoke({"simulate", cfg, "--output-dir", dir.string(), "--strict"}).code == fbve::cli::kAcceptance);

  const auto mdir = workdir("mms");
  const auto mcfg = write_config(mdir,
      "[grid]\nn1 = 16\nn2 = 9\n[material]\nc0 = 0.9\n[experiment]\nmms_n1 = [8, 16, 32]\n"
      "mms_t_end = 0.05\norder_min = 3.0\norder_max = 4.0\n");
  const auto m = invoke({"mms", mcfg, "--output-dir", mdir.string()});
  CHECK(m.code == fbve::cli::kAcceptance);
  CHECK(fs::exists(mdir / "mms.csv"));
}
