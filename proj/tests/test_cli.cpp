#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRoot = GAAS_TEST_TMP;

int run(const std::string& args) {
  const std::string cmd = std::string(GAAS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path dir(const std::string& name) {
  const fs::path p = kRoot / name;
  fs::remove_all(p);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Built-in configs written by the case study, shared by the other tests.
const fs::path& casestudy_dir() {
  static const fs::path d = [] {
    const fs::path p = dir("casestudy");
    REQUIRE(run("casestudy --out " + p.string()) == 0);
    return p;
  }();
  return d;
}

void check_manifest(const fs::path& out, const std::string& command) {
  const json m = read_json(out / "manifest.json");
  CHECK(m["command"] == command);
  CHECK(m["config_digest"].get<std::string>().size() == 64);
  CHECK(m["version"].get<std::string>().size() > 0);
  CHECK(m["duration_seconds"].get<double>() >= 0.0);
  for (const auto& o : m["outputs"]) CHECK(fs::exists(o.get<std::string>()));
}

}  // namespace

TEST_CASE("casestudy reproduces the summary values") {
  const fs::path& out = casestudy_dir();
  check_manifest(out, "casestudy");
  const json s = read_json(out / "summary.json");
  CHECK(s["passed"] == true);
  CHECK(s["input_bound"].get<double>() == doctest::Approx(0.5690).epsilon(1e-3));
  CHECK(s["rbar1"].get<double>() <= 1e-9);
  CHECK(s["rbar2"].get<double>() <= 1e-9);
  CHECK(s["rbar3"].get<double>() == doctest::Approx(2.0558).epsilon(1e-4));
  CHECK(s["rbar_max"].get<double>() == doctest::Approx(0.0999).epsilon(1e-3));
  CHECK(s["feasibility_ratio"].get<double>() == doctest::Approx(0.3996).epsilon(1e-3));
  CHECK(s["switched"]["max_err"].get<double>() <= 0.5);
  CHECK(s["ramp"]["gaas"]["max_err"].get<double>() <= 0.5);
  CHECK(s["ramp"]["baseline"]["max_err"].get<double>() > 0.5);
  CHECK(s["ramp"]["verdict"] == "gaas_only");
}

TEST_CASE("casestudy overrides: same epsilon is identical, halved resolution agrees") {
  const fs::path& base = casestudy_dir();
  const fs::path same = dir("casestudy_eps");
  REQUIRE(run("casestudy --epsilon 0.5 --out " + same.string()) == 0);
  CHECK(read_text(base / "summary.json") == read_text(same / "summary.json"));
  CHECK(read_text(base / "trajectory.csv") == read_text(same / "trajectory.csv"));
  CHECK(read_json(base / "manifest.json")["config_digest"] == read_json(same / "manifest.json")["config_digest"]);

  const fs::path coarse = dir("casestudy_step");
  REQUIRE(run("casestudy --step 2e-3 --out " + coarse.string()) == 0);
  const json a = read_json(base / "verify.json")["final"];
  const json b = read_json(coarse / "verify.json")["final"];
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(a["x"][i].get<double>() - b["x"][i].get<double>()) < 1e-6);
  }
  CHECK(std::abs(a["xhat"][0].get<double>() - b["xhat"][0].get<double>()) < 1e-6);
  CHECK(read_json(base / "manifest.json")["config_digest"] != read_json(coarse / "manifest.json")["config_digest"]);
}

TEST_CASE("synthesize: exit codes and structural gains") {
  const fs::path cfg = casestudy_dir() / "casestudy_switched.json";
  const fs::path out = dir("synth");
  REQUIRE(run("synthesize --config " + cfg.string() + " --out " + out.string()) == 0);
  check_manifest(out, "synthesize");
  const json g = read_json(out / "gains.json");
  CHECK(g["P"][0][0].get<double>() == doctest::Approx(1.0));
  CHECK(std::abs(g["P"][1][0].get<double>()) <= 1e-12);
  CHECK(std::abs(g["Q"][0][0].get<double>()) <= 1e-12);
  CHECK(std::abs(g["S"][0][0].get<double>()) <= 1e-12);
  CHECK(g["S"][1][0].get<double>() == doctest::Approx(1.0));
  CHECK(std::abs(g["R"][0][0].get<double>()) <= 1e-12);
  CHECK(read_json(out / "report.json")["passed"] == true);

  const fs::path bad_a1 = dir("synth_a1");
  CHECK(run("synthesize --config " + cfg.string() + " --a1 1.5 --out " + bad_a1.string()) == 1);
  const json rep = read_json(bad_a1 / "report.json");
  bool decay_failed = false;
  for (const auto& r : rep["records"])
    if (r["name"] == "lyapunov_decay") decay_failed = r["pass"] == false;
  CHECK(decay_failed);

  json doc = read_json(cfg);
  doc["scenario"].erase("K");
  const fs::path nok = kRoot / "no_k.json";
  std::ofstream(nok) << doc.dump();
  CHECK(run("synthesize --config " + nok.string() + " --out " + dir("synth_nok").string()) == 2);
  CHECK(run("synthesize --config /nonexistent.json --out " + dir("synth_missing").string()) == 2);
}

TEST_CASE("simulate: pass, tightened epsilon, zero horizon, bad gains") {
  const fs::path cfg = casestudy_dir() / "casestudy_switched.json";
  const fs::path gains = casestudy_dir() / "gains.json";
  const fs::path out = dir("sim");
  REQUIRE(run("simulate --config " + cfg.string() + " --gains " + gains.string() + " --horizon 350 --out " +
              out.string()) == 0);
  check_manifest(out, "simulate");
  const json v = read_json(out / "verify.json");
  CHECK(v["max_err"].get<double>() <= 0.5);
  CHECK(v["jump_count"] == 1);
  CHECK(read_text(out / "jumps.csv").rfind("tau,delta1,lhs,rhs,pass", 0) == 0);

  CHECK(run("simulate --config " + cfg.string() + " --gains " + gains.string() +
            " --epsilon 0.15 --horizon 20 --out " + dir("sim_eps").string()) == 1);

  const fs::path zero = dir("sim_zero");
  CHECK(run("simulate --config " + cfg.string() + " --gains " + gains.string() + " --horizon 0 --out " +
            zero.string()) == 0);
  std::size_t rows = 0;
  for (char c : read_text(zero / "trajectory.csv")) rows += c == '\n';
  CHECK(rows == 2);

  const fs::path bad = kRoot / "bad_gains.json";
  std::ofstream(bad) << R"({"M": [[1]]})";
  CHECK(run("simulate --config " + cfg.string() + " --gains " + bad.string() + " --out " +
            dir("sim_bad").string()) == 2);
  CHECK(run("simulate --config " + cfg.string() + " --out " + dir("sim_nogains").string()) == 2);
}

TEST_CASE("compare on the ramp scenario") {
  const fs::path cfg = casestudy_dir() / "casestudy_ramp.json";
  const fs::path out = dir("compare");
  REQUIRE(run("compare --config " + cfg.string() + " --csv-stride 50 --out " + out.string()) == 0);
  check_manifest(out, "compare");
  const json s = read_json(out / "summary.json");
  CHECK(s["gaas"]["max_err"].get<double>() <= 0.5);
  CHECK(s["baseline"]["max_err"].get<double>() > 0.5);
  CHECK(s["verdict"] == "gaas_only");
}

TEST_CASE("manifest digest follows config content") {
  const fs::path cfg = casestudy_dir() / "casestudy_switched.json";
  const fs::path a = dir("digest_a"), b = dir("digest_b"), c = dir("digest_c");
  REQUIRE(run("synthesize --config " + cfg.string() + " --out " + a.string()) == 0);
  REQUIRE(run("synthesize --config " + cfg.string() + " --out " + b.string()) == 0);
  REQUIRE(run("synthesize --config " + cfg.string() + " --epsilon 0.45 --out " + c.string()) == 0);
  const auto digest = [](const fs::path& p) { return read_json(p / "manifest.json")["config_digest"]; };
  CHECK(digest(a) == digest(b));
  CHECK(digest(a) != digest(c));
}

TEST_CASE("random scenarios and usage errors") {
  CHECK(run("random --seed 3 --out " + dir("random").string()) == 0);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("synthesize --out " + dir("usage").string()) == 2);
  CHECK(run("synthesize --config x.json --step abc") == 2);
  CHECK(run("--help") == 0);
}
