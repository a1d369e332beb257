// gaas: synthesize, simulate and compare refinement interfaces from JSON
// scenario files. Exit codes: 0 pass, 1 check/verification failure,
// 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/sha.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gaas/gaas.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Deleter {
  void operator()(gaas_scenario* p) const { gaas_scenario_free(p); }
  void operator()(gaas_gains* p) const { gaas_gains_free(p); }
  void operator()(gaas_report* p) const { gaas_report_free(p); }
  void operator()(gaas_trajectory* p) const { gaas_trajectory_free(p); }
  void operator()(gaas_verification* p) const { gaas_verification_free(p); }
};
using Scenario = std::unique_ptr<gaas_scenario, Deleter>;
using Gains = std::unique_ptr<gaas_gains, Deleter>;
using Report = std::unique_ptr<gaas_report, Deleter>;
using Trajectory = std::unique_ptr<gaas_trajectory, Deleter>;
using Verification = std::unique_ptr<gaas_verification, Deleter>;

// Failure carrying the exit code it maps to.
struct Failure {
  int exit_code;
  std::string message;
};

bool is_input_error(gaas_status st) {
  switch (st) {
    case GAAS_ERR_SCHEMA:
    case GAAS_ERR_DIMENSION_MISMATCH:
    case GAAS_ERR_INVARIANT_VIOLATION:
    case GAAS_ERR_IO:
    case GAAS_ERR_INVALID_ARGUMENT:
    case GAAS_ERR_NON_FINITE:
    case GAAS_ERR_NON_SQUARE:
    case GAAS_ERR_NOT_SYMMETRIC:
    case GAAS_ERR_NOT_PSD:
      return true;
    default:
      return false;
  }
}

void check(gaas_status st, const std::string& context) {
  if (st == GAAS_OK) return;
  const std::string detail = gaas_last_error();
  const std::string msg = context + ": " + (detail.empty() ? gaas_status_name(st) : detail);
  throw Failure{is_input_error(st) ? kUsage : kFail, msg};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  gaas_string_free(s);
  return out;
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

struct Options {
  std::string config;
  std::string gains;
  std::string out = ".";
  std::optional<double> epsilon, a1, step, horizon;
  bool force_s_zero = false;
  std::uint64_t seed = 0;
  std::size_t csv_stride = 1;
};

class Run {
 public:
  Run(std::string command, const Options& opt)
      : command_(std::move(command)), out_dir_(opt.out), start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    if (ec) throw Failure{kUsage, "cannot create output directory " + out_dir_.string() + ": " + ec.message()};
  }

  fs::path path(const std::string& name) const { return out_dir_ / name; }

  void write(const std::string& name, const std::string& text) {
    const fs::path p = path(name);
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
    if (!out) throw Failure{kUsage, "cannot write " + p.string()};
    record(name);
  }

  void record(const std::string& name) { outputs_.push_back(path(name).string()); }

  void set_digest(const std::string& canonical_config) { digest_ = sha256_hex(canonical_config); }

  void finish() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m = {{"command", command_},
              {"config_digest", digest_},
              {"outputs", outputs_},
              {"version", gaas_version()},
              {"duration_seconds", secs}};
    std::ofstream out(path("manifest.json"), std::ios::binary);
    out << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  fs::path out_dir_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
  std::string digest_;
};

Scenario load_scenario(const Options& opt) {
  if (opt.config.empty()) throw Failure{kUsage, "--config is required"};
  gaas_scenario* raw = nullptr;
  check(gaas_scenario_from_file(opt.config.c_str(), &raw), "config");
  Scenario s(raw);
  if (opt.epsilon) check(gaas_scenario_set_epsilon(s.get(), *opt.epsilon), "--epsilon");
  if (opt.a1) check(gaas_scenario_set_a1(s.get(), *opt.a1), "--a1");
  if (opt.step) check(gaas_scenario_set_step(s.get(), *opt.step), "--step");
  if (opt.horizon) check(gaas_scenario_set_horizon(s.get(), *opt.horizon), "--horizon");
  return s;
}

std::string canonical(const gaas_scenario* s) {
  char* text = nullptr;
  check(gaas_scenario_to_json(s, &text), "config");
  return take(text);
}

Gains synthesize(const gaas_scenario* s, bool force_s_zero) {
  gaas_gains* g = nullptr;
  check(gaas_synthesize(s, force_s_zero ? 1 : 0, &g), "synthesis");
  return Gains(g);
}

Report check_conditions(const gaas_scenario* s, const gaas_gains* g) {
  gaas_report* r = nullptr;
  check(gaas_check(s, g, &r), "condition check");
  return Report(r);
}

double report_scalar(const gaas_report* r, const char* name) {
  double v = 0.0;
  check(gaas_report_scalar(r, name, &v), name);
  return v;
}

double gains_scalar(const gaas_gains* g, const char* name) {
  double v = 0.0;
  check(gaas_gains_scalar(g, name, &v), name);
  return v;
}

double verification_scalar(const gaas_verification* v, const char* name) {
  double x = 0.0;
  check(gaas_verification_scalar(v, name, &x), name);
  return x;
}

struct SimOutcome {
  Trajectory trajectory;
  Verification verification;
};

SimOutcome simulate_and_verify(const gaas_scenario* s, const gaas_gains* g) {
  gaas_trajectory* t = nullptr;
  check(gaas_simulate(s, g, 1, &t), "simulation");
  Trajectory traj(t);
  gaas_verification* v = nullptr;
  check(gaas_verify(s, g, traj.get(), 1, 0.0, &v), "verification");
  return {std::move(traj), Verification(v)};
}

void write_trajectory(Run& run, const SimOutcome& o, const std::string& prefix, std::size_t stride) {
  const std::string traj = prefix + "trajectory.csv";
  const std::string jumps = prefix + "jumps.csv";
  check(gaas_trajectory_write_csv(o.trajectory.get(), run.path(traj).c_str(), stride), traj);
  run.record(traj);
  check(gaas_trajectory_write_jumps_csv(o.trajectory.get(), run.path(jumps).c_str()), jumps);
  run.record(jumps);
}

std::string verification_json(const gaas_verification* v) {
  char* text = nullptr;
  check(gaas_verification_to_json(v, &text), "verification");
  return take(text);
}

// Synthesize + check; returns whether every condition passed.
bool do_synthesize(Run& run, const gaas_scenario* s, bool force_s_zero, Gains& gains_out,
                   Report& report_out, const std::string& prefix = "") {
  gains_out = synthesize(s, force_s_zero);
  report_out = check_conditions(s, gains_out.get());
  char* text = nullptr;
  check(gaas_gains_to_json(gains_out.get(), &text), "gains");
  run.write(prefix + "gains.json", take(text));
  check(gaas_report_to_json(report_out.get(), &text), "report");
  run.write(prefix + "report.json", take(text));
  return gaas_report_passed(report_out.get()) != 0;
}

int cmd_synthesize(const Options& opt) {
  Run run("synthesize", opt);
  Scenario s = load_scenario(opt);
  run.set_digest(canonical(s.get()));
  Gains g;
  Report r;
  const bool ok = do_synthesize(run, s.get(), opt.force_s_zero, g, r);
  run.finish();
  if (!ok) {
    char* text = nullptr;
    check(gaas_report_to_json(r.get(), &text), "report");
    const json doc = json::parse(take(text));
    for (const auto& rec : doc["records"]) {
      if (!rec["pass"].get<bool>()) std::cerr << "condition failed: " << rec["name"].get<std::string>() << "\n";
    }
  }
  return ok ? kPass : kFail;
}

int cmd_simulate(const Options& opt) {
  Run run("simulate", opt);
  Scenario s = load_scenario(opt);
  run.set_digest(canonical(s.get()));
  if (opt.gains.empty()) throw Failure{kUsage, "--gains is required"};
  std::ifstream in(opt.gains, std::ios::binary);
  if (!in) throw Failure{kUsage, "cannot open gains file: " + opt.gains};
  std::stringstream ss;
  ss << in.rdbuf();
  gaas_gains* raw = nullptr;
  check(gaas_gains_from_json(s.get(), ss.str().c_str(), &raw), "gains");
  Gains g(raw);

  const SimOutcome o = simulate_and_verify(s.get(), g.get());
  write_trajectory(run, o, "", opt.csv_stride);
  run.write("verify.json", verification_json(o.verification.get()));
  run.finish();
  const bool ok = gaas_verification_passed(o.verification.get()) != 0;
  if (!ok) {
    const json doc = json::parse(verification_json(o.verification.get()));
    if (!doc["initial_in_relation"].get<bool>()) {
      std::cerr << "warning: initial state is outside the relation (vg = " << doc["initial_vg"] << ")\n";
    }
    for (const auto& c : doc["checks"]) {
      if (c["violations"].get<std::size_t>() > 0) {
        std::cerr << "check failed: " << c["name"].get<std::string>() << " (" << c["violations"]
                  << " violations, first at t = " << c["first_violation_time"] << ")\n";
      }
    }
  }
  return ok ? kPass : kFail;
}

struct CompareResult {
  json summary;
  bool gaas_ok = false;
  bool baseline_fails = false;
};

CompareResult compare(Run& run, const gaas_scenario* s, std::size_t stride) {
  double eps = 0.0;
  {
    const json doc = json::parse(canonical(s));
    eps = doc["scenario"]["epsilon"].get<double>();
  }
  Gains g_full, g_base;
  Report r_full, r_base;
  const bool full_ok = do_synthesize(run, s, false, g_full, r_full, "gaas_");
  const bool base_ok = do_synthesize(run, s, true, g_base, r_base, "baseline_");

  auto full = std::async(std::launch::async, simulate_and_verify, s, g_full.get());
  auto base = std::async(std::launch::async, simulate_and_verify, s, g_base.get());
  const SimOutcome of = full.get();
  const SimOutcome ob = base.get();
  write_trajectory(run, of, "gaas_", stride);
  write_trajectory(run, ob, "baseline_", stride);
  run.write("gaas_verify.json", verification_json(of.verification.get()));
  run.write("baseline_verify.json", verification_json(ob.verification.get()));

  const auto side = [&](const gaas_gains* g, const gaas_verification* v, bool report_ok) {
    return json{{"max_err", verification_scalar(v, "max_err")},
                {"max_vg", verification_scalar(v, "max_vg")},
                {"max_u", verification_scalar(v, "max_u")},
                {"rbar2", gains_scalar(g, "rbar2")},
                {"rbar3", gains_scalar(g, "rbar3")},
                {"input_bound", gains_scalar(g, "input_bound")},
                {"conditions_passed", report_ok},
                {"verification_passed", gaas_verification_passed(v) != 0},
                {"within_epsilon", verification_scalar(v, "max_err") <= eps}};
  };
  CompareResult res;
  res.summary["epsilon"] = eps;
  res.summary["gaas"] = side(g_full.get(), of.verification.get(), full_ok);
  res.summary["baseline"] = side(g_base.get(), ob.verification.get(), base_ok);
  const bool a = res.summary["gaas"]["within_epsilon"].get<bool>();
  const bool b = res.summary["baseline"]["within_epsilon"].get<bool>();
  res.summary["verdict"] = a && !b ? "gaas_only" : a && b ? "both" : b ? "baseline_only" : "neither";
  res.gaas_ok = a;
  res.baseline_fails = !b;
  return res;
}

int cmd_compare(const Options& opt) {
  Run run("compare", opt);
  Scenario s = load_scenario(opt);
  run.set_digest(canonical(s.get()));
  const CompareResult res = compare(run, s.get(), opt.csv_stride);
  run.write("summary.json", res.summary.dump(2));
  run.finish();
  return kPass;
}

Scenario builtin(const char* name, const Options& opt) {
  gaas_scenario* raw = nullptr;
  check(gaas_scenario_builtin(name, &raw), name);
  Scenario s(raw);
  if (opt.epsilon) check(gaas_scenario_set_epsilon(s.get(), *opt.epsilon), "--epsilon");
  if (opt.a1) check(gaas_scenario_set_a1(s.get(), *opt.a1), "--a1");
  if (opt.step) check(gaas_scenario_set_step(s.get(), *opt.step), "--step");
  if (opt.horizon) check(gaas_scenario_set_horizon(s.get(), *opt.horizon), "--horizon");
  return s;
}

void row(const std::string& label, const std::string& value, const std::string& expect = "") {
  std::printf("  %-34s %-14s %s\n", label.c_str(), value.c_str(), expect.c_str());
}

std::string fmt(double v, int prec = 5) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

int cmd_casestudy(const Options& in) {
  Options opt = in;
  if (in.csv_stride == 1) opt.csv_stride = 100;
  Run run("casestudy", opt);
  Scenario sw = builtin("casestudy_switched", opt);
  Scenario ramp = builtin("casestudy_ramp", opt);
  const std::string sw_text = canonical(sw.get());
  const std::string ramp_text = canonical(ramp.get());
  run.set_digest(sw_text + ramp_text);
  run.write("casestudy_switched.json", sw_text);
  run.write("casestudy_ramp.json", ramp_text);

  Gains g;
  Report r;
  const bool report_ok = do_synthesize(run, sw.get(), false, g, r);
  const SimOutcome o = simulate_and_verify(sw.get(), g.get());
  write_trajectory(run, o, "", opt.csv_stride);
  run.write("verify.json", verification_json(o.verification.get()));
  const bool sim_ok = gaas_verification_passed(o.verification.get()) != 0;
  const CompareResult cmp = compare(run, ramp.get(), opt.csv_stride);

  const double b = gains_scalar(g.get(), "input_bound");
  const double rbar1 = gains_scalar(g.get(), "rbar1");
  const double rbar2 = gains_scalar(g.get(), "rbar2");
  const double rbar3 = gains_scalar(g.get(), "rbar3");
  const double rbar_max = report_scalar(r.get(), "rbar_max");
  const double ratio = report_scalar(r.get(), "feasibility_ratio");
  const double max_err = verification_scalar(o.verification.get(), "max_err");
  const double max_vg = verification_scalar(o.verification.get(), "max_vg");
  const double jumps = verification_scalar(o.verification.get(), "jump_count");
  const double jumps_ok = verification_scalar(o.verification.get(), "jumps_passed");

  json summary = {{"input_bound", b},
                  {"rbar1", rbar1},
                  {"rbar2", rbar2},
                  {"rbar3", rbar3},
                  {"rbar_max", rbar_max},
                  {"feasibility_ratio", ratio},
                  {"conditions_passed", report_ok},
                  {"switched", {{"max_err", max_err}, {"max_vg", max_vg}, {"jumps", static_cast<long>(jumps)},
                                {"jumps_passed", static_cast<long>(jumps_ok)}, {"verification_passed", sim_ok}}},
                  {"ramp", cmp.summary}};
  const bool all_ok = report_ok && sim_ok && cmp.gaas_ok && cmp.baseline_fails;
  summary["passed"] = all_ok;
  run.write("summary.json", summary.dump(2));
  run.finish();

  std::printf("case study (outputs in %s)\n", opt.out.c_str());
  row("input bound b", fmt(b), "(expect ~0.5690)");
  row("rbar1 / rbar2", fmt(rbar1, 2) + " / " + fmt(rbar2, 2), "(expect 0 / 0)");
  row("rbar3", fmt(rbar3), "(expect ~2.0558)");
  row("rbar_max", fmt(rbar_max), "(expect ~0.0999)");
  row("2 rbar_max / a1", fmt(ratio), "(expect ~0.3996 <= eps)");
  row("conditions", report_ok ? "pass" : "FAIL");
  row("switched: max |y - yhat|", fmt(max_err), sim_ok ? "pass" : "FAIL");
  row("switched: max vg", fmt(max_vg));
  row("switched: jumps passed", fmt(jumps_ok, 0) + " / " + fmt(jumps, 0));
  row("ramp gAAS: max |y - yhat|", fmt(cmp.summary["gaas"]["max_err"].get<double>()),
      cmp.gaas_ok ? "within eps" : "EXCEEDS eps");
  row("ramp S=0 baseline: max |y - yhat|", fmt(cmp.summary["baseline"]["max_err"].get<double>()),
      cmp.baseline_fails ? "exceeds eps" : "within eps (unexpected)");
  row("overall", all_ok ? "pass" : "FAIL");
  return all_ok ? kPass : kFail;
}

int cmd_random(const Options& opt) {
  Run run("random", opt);
  gaas_scenario* raw = nullptr;
  check(gaas_scenario_random(opt.seed, &raw), "random scenario");
  Scenario s(raw);
  if (opt.epsilon) check(gaas_scenario_set_epsilon(s.get(), *opt.epsilon), "--epsilon");
  if (opt.a1) check(gaas_scenario_set_a1(s.get(), *opt.a1), "--a1");
  if (opt.step) check(gaas_scenario_set_step(s.get(), *opt.step), "--step");
  if (opt.horizon) check(gaas_scenario_set_horizon(s.get(), *opt.horizon), "--horizon");
  const std::string text = canonical(s.get());
  run.set_digest(text);
  run.write("config.json", text);
  Gains g;
  Report r;
  const bool report_ok = do_synthesize(run, s.get(), opt.force_s_zero, g, r);
  const SimOutcome o = simulate_and_verify(s.get(), g.get());
  write_trajectory(run, o, "", opt.csv_stride);
  run.write("verify.json", verification_json(o.verification.get()));
  run.finish();
  return report_ok && gaas_verification_passed(o.verification.get()) ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesis and verification of refinement interfaces between linear systems"};
  app.set_version_flag("--version", gaas_version());
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "Scenario JSON file");
    if (needs_config) c->required();
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--epsilon", opt.epsilon, "Override scenario.epsilon");
    sub->add_option("--a1", opt.a1, "Override scenario.a1");
    sub->add_option("--step", opt.step, "Override scenario.step");
    sub->add_option("--horizon", opt.horizon, "Override scenario.horizon");
    sub->add_option("--csv-stride", opt.csv_stride, "Write every k-th trajectory row")
        ->check(CLI::PositiveNumber);
  };

  auto* syn = app.add_subcommand("synthesize", "Synthesize gains and check every condition");
  common(syn, true);
  syn->add_flag("--force-s-zero", opt.force_s_zero, "Baseline interface with S = 0");
  auto* sim = app.add_subcommand("simulate", "Simulate with given gains and verify the trajectory");
  common(sim, true);
  sim->add_option("--gains", opt.gains, "Gains JSON from synthesize")->required();
  auto* cmp = app.add_subcommand("compare", "Run the full interface against the S = 0 baseline");
  common(cmp, true);
  auto* cs = app.add_subcommand("casestudy", "Run the embedded double-integrator case study");
  common(cs, false);
  auto* rnd = app.add_subcommand("random", "Generate, synthesize and verify a random scenario");
  common(rnd, false);
  rnd->add_option("--seed", opt.seed, "Scenario seed")->capture_default_str();
  rnd->add_flag("--force-s-zero", opt.force_s_zero, "Baseline interface with S = 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*syn) return cmd_synthesize(opt);
    if (*sim) return cmd_simulate(opt);
    if (*cmp) return cmd_compare(opt);
    if (*cs) return cmd_casestudy(opt);
    if (*rnd) return cmd_random(opt);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
