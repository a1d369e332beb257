#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gaas/gaas.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  gaas_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(gaas_version()).size() > 0);
  CHECK(std::string(gaas_status_name(GAAS_OK)) == "Ok");
  CHECK(std::string(gaas_status_name(GAAS_ERR_SCHEMA)) == "SchemaError");
  CHECK(std::string(gaas_status_name(GAAS_ERR_NOT_STABILIZING)) == "NotStabilizing");
}

TEST_CASE("errors map to status codes with a message") {
  gaas_scenario* s = nullptr;
  CHECK(gaas_scenario_from_json("{}", &s) == GAAS_ERR_SCHEMA);
  CHECK(s == nullptr);
  CHECK(std::string(gaas_last_error()).find("SchemaError") != std::string::npos);
  CHECK(gaas_scenario_from_file("/nonexistent.json", &s) == GAAS_ERR_IO);
  CHECK(gaas_scenario_builtin("nope", &s) == GAAS_ERR_INVALID_ARGUMENT);
  CHECK(gaas_scenario_builtin(nullptr, &s) == GAAS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("case-study pipeline through the C interface") {
  gaas_scenario* s = nullptr;
  REQUIRE(gaas_scenario_builtin("casestudy_switched", &s) == GAAS_OK);
  CHECK(gaas_scenario_set_step(s, -1.0) == GAAS_ERR_INVARIANT_VIOLATION);
  REQUIRE(gaas_scenario_set_horizon(s, 400.0) == GAAS_OK);

  gaas_gains* g = nullptr;
  REQUIRE(gaas_synthesize(s, 0, &g) == GAAS_OK);
  double v = 0;
  REQUIRE(gaas_gains_scalar(g, "rbar3", &v) == GAAS_OK);
  CHECK(v == doctest::Approx(2.05577).epsilon(1e-5));
  REQUIRE(gaas_gains_scalar(g, "input_bound", &v) == GAAS_OK);
  CHECK(v == doctest::Approx(0.5690).epsilon(1e-3));
  CHECK(gaas_gains_scalar(g, "nonsense", &v) == GAAS_ERR_INVALID_ARGUMENT);

  double buf[4];
  size_t r = 0, c = 0;
  REQUIRE(gaas_gains_matrix(g, "S", buf, 4, &r, &c) == GAAS_OK);
  CHECK(r == 2);
  CHECK(c == 1);
  CHECK(std::abs(buf[0]) <= 1e-12);
  CHECK(buf[1] == doctest::Approx(1.0));
  CHECK(gaas_gains_matrix(g, "M", buf, 2, &r, &c) == GAAS_ERR_INVALID_ARGUMENT);

  gaas_report* rep = nullptr;
  REQUIRE(gaas_check(s, g, &rep) == GAAS_OK);
  CHECK(gaas_report_passed(rep) == 1);
  int pass = 0;
  REQUIRE(gaas_report_record(rep, "lyapunov_decay", &v, &pass) == GAAS_OK);
  CHECK(pass == 1);
  CHECK(v < 0.0);
  REQUIRE(gaas_report_scalar(rep, "rbar_max", &v) == GAAS_OK);
  CHECK(v == doctest::Approx(0.0999).epsilon(1e-3));
  char* text = nullptr;
  REQUIRE(gaas_report_to_json(rep, &text) == GAAS_OK);
  CHECK(take(text).find("\"records\"") != std::string::npos);

  // Gains survive a JSON round trip.
  REQUIRE(gaas_gains_to_json(g, &text) == GAAS_OK);
  const std::string gj = take(text);
  gaas_gains* g2 = nullptr;
  REQUIRE(gaas_gains_from_json(s, gj.c_str(), &g2) == GAAS_OK);
  REQUIRE(gaas_gains_scalar(g2, "rbar3", &v) == GAAS_OK);
  CHECK(v == doctest::Approx(2.05577).epsilon(1e-5));

  gaas_trajectory* t = nullptr;
  REQUIRE(gaas_simulate(s, g2, 1, &t) == GAAS_OK);
  CHECK(gaas_trajectory_jump_count(t) == 1);  // x-hat reaches 30 near t = 290
  double tf = 0, x[2], xh[1];
  REQUIRE(gaas_trajectory_final(t, &tf, x, 2, xh, 1) == GAAS_OK);
  CHECK(tf == doctest::Approx(400.0));
  CHECK(gaas_trajectory_final(t, &tf, x, 1, xh, 1) == GAAS_ERR_INVALID_ARGUMENT);

  gaas_verification* ver = nullptr;
  REQUIRE(gaas_verify(s, g2, t, 1, 0.0, &ver) == GAAS_OK);
  CHECK(gaas_verification_passed(ver) == 1);
  REQUIRE(gaas_verification_scalar(ver, "max_err", &v) == GAAS_OK);
  CHECK(v <= 0.5);
  REQUIRE(gaas_verification_scalar(ver, "initial_vg", &v) == GAAS_OK);
  CHECK(v == doctest::Approx(0.19886).epsilon(1e-4));
  REQUIRE(gaas_verification_to_json(ver, &text) == GAAS_OK);
  CHECK(take(text).find("\"max_err\"") != std::string::npos);

  const std::string path = "capi_traj.csv";
  CHECK(gaas_trajectory_write_csv(t, path.c_str(), 100) == GAAS_OK);
  CHECK(gaas_trajectory_write_csv(t, "/nonexistent/dir/x.csv", 1) == GAAS_ERR_IO);
  std::remove(path.c_str());

  gaas_verification_free(ver);
  gaas_trajectory_free(t);
  gaas_gains_free(g2);
  gaas_report_free(rep);
  gaas_gains_free(g);
  gaas_scenario_free(s);
}

TEST_CASE("gains JSON with wrong shapes is rejected") {
  gaas_scenario* s = nullptr;
  REQUIRE(gaas_scenario_builtin("casestudy_ramp", &s) == GAAS_OK);
  gaas_gains* g = nullptr;
  CHECK(gaas_gains_from_json(s, "{\"M\": [[1]]}", &g) == GAAS_ERR_SCHEMA);
  CHECK(gaas_gains_from_json(s,
                             "{\"M\": [[1]], \"K\": [[1]], \"P\": [[1]], \"Q\": [[1]], \"S\": [[1]], \"R\": [[1]]}",
                             &g) == GAAS_ERR_DIMENSION_MISMATCH);
  gaas_scenario_free(s);
}

TEST_CASE("synthesis failures surface as statuses") {
  gaas_scenario* s = nullptr;
  REQUIRE(gaas_scenario_builtin("casestudy_switched", &s) == GAAS_OK);
  // Drop the user weight so M must be synthesized for a destabilizing K.
  char* text = nullptr;
  REQUIRE(gaas_scenario_to_json(s, &text) == GAAS_OK);
  auto doc = nlohmann::json::parse(take(text));
  doc["scenario"].erase("M");
  doc["scenario"]["K"] = {{1.3298, 1.4108}};
  gaas_scenario* bad = nullptr;
  REQUIRE(gaas_scenario_from_json(doc.dump().c_str(), &bad) == GAAS_OK);
  gaas_gains* g = nullptr;
  CHECK(gaas_synthesize(bad, 0, &g) == GAAS_ERR_NOT_STABILIZING);
  CHECK(g == nullptr);
  gaas_scenario_free(bad);
  gaas_scenario_free(s);
}

TEST_CASE("independent handles are usable from several threads") {
  std::vector<std::thread> workers;
  std::vector<double> results(4, 0.0);
  for (int i = 0; i < 4; ++i) {
    workers.emplace_back([i, &results] {
      gaas_scenario* s = nullptr;
      if (gaas_scenario_random(static_cast<uint64_t>(i), &s) != GAAS_OK) return;
      gaas_gains* g = nullptr;
      if (gaas_synthesize(s, 0, &g) == GAAS_OK) gaas_gains_scalar(g, "lambda_min_M", &results[i]);
      gaas_gains_free(g);
      gaas_scenario_free(s);
    });
  }
  for (auto& w : workers) w.join();
  for (double r : results) CHECK(r > 0.0);
}
