#include <doctest.h>

#include <json.hpp>
#include <random>
#include <string>

#include "gaas/error.hpp"
#include "gaas/model.hpp"
#include "gaas/scenarios.hpp"
#include "support.hpp"

using gaas::Matrix;
using gaas::Vector;
using nlohmann::json;

namespace {

json switched_doc() { return json::parse(gaas::scenarios::builtin_config("casestudy_switched")); }

// Parses `doc` expecting failure; returns (code, message).
std::pair<gaas::ErrorCode, std::string> parse_error(const json& doc) {
  try {
    gaas::parse_config(doc.dump());
  } catch (const gaas::Error& e) {
    return {e.code(), e.what()};
  }
  FAIL("expected parse_config to throw");
  return {};
}

}  // namespace

TEST_CASE("case-study config parses with the expected dimensions") {
  const auto s = testing::switched_case();
  CHECK(s.concrete.n() == 2);
  CHECK(s.concrete.m() == 1);
  CHECK(s.concrete.p() == 1);
  CHECK(s.abstract.n() == 1);
  CHECK(s.abstract.m() == 1);
  CHECK(s.concrete.A == testing::kA);
  CHECK(s.policy.kind == gaas::PolicyKind::SwitchedFeedback);
  CHECK(s.policy.regions.size() == 4);
  CHECK(s.params.M.has_value());
  CHECK(gaas::validate_pair(s.concrete, s.abstract).ok());
}

TEST_CASE("defaults for epsilon, step and xhat0") {
  json doc = switched_doc();
  doc["scenario"].erase("epsilon");
  doc["scenario"].erase("step");
  doc["scenario"].erase("xhat0");
  const auto s = gaas::parse_config(doc.dump());
  CHECK(s.params.epsilon == 0.5);
  CHECK(s.params.step == 1e-3);
  CHECK(s.params.xhat0 == Vector{40.1});
}

TEST_CASE("schema errors carry the offending path") {
  json doc = switched_doc();
  doc["scenario"].erase("K");
  auto [code, msg] = parse_error(doc);
  CHECK(code == gaas::ErrorCode::SchemaError);
  CHECK(msg.find("scenario.K") != std::string::npos);

  doc = switched_doc();
  doc["concrete"]["extra"] = 1;
  std::tie(code, msg) = parse_error(doc);
  CHECK(code == gaas::ErrorCode::SchemaError);
  CHECK(msg.find("extra") != std::string::npos);

  doc = switched_doc();
  doc["envelope"]["xhat_max"] = "large";
  std::tie(code, msg) = parse_error(doc);
  CHECK(code == gaas::ErrorCode::SchemaError);
  CHECK(msg.find("envelope.xhat_max") != std::string::npos);

  std::tie(code, msg) = [] {
    try {
      gaas::parse_config("{not json");
    } catch (const gaas::Error& e) {
      return std::pair{e.code(), std::string(e.what())};
    }
    return std::pair{gaas::ErrorCode::Io, std::string()};
  }();
  CHECK(code == gaas::ErrorCode::SchemaError);
}

TEST_CASE("dimension mismatches name the field") {
  json doc = switched_doc();
  doc["concrete"]["B"] = json::array({json::array({0}), json::array({1}), json::array({2})});
  auto [code, msg] = parse_error(doc);
  CHECK(code == gaas::ErrorCode::DimensionMismatch);
  CHECK(msg.find("concrete.B") != std::string::npos);

  doc = switched_doc();
  doc["scenario"]["K"] = json::array({json::array({1, 2, 3})});
  std::tie(code, msg) = parse_error(doc);
  CHECK(code == gaas::ErrorCode::DimensionMismatch);
  CHECK(msg.find("scenario.K") != std::string::npos);
}

TEST_CASE("invariant violations") {
  json doc = switched_doc();
  doc["concrete"]["input_ball_radius"] = 0.0;
  CHECK(parse_error(doc).first == gaas::ErrorCode::InvariantViolation);

  json ramp = json::parse(gaas::scenarios::builtin_config("casestudy_ramp"));
  ramp["policy"]["segments"] = json::array();
  auto [code, msg] = parse_error(ramp);
  CHECK(code == gaas::ErrorCode::InvariantViolation);
  CHECK(msg.find("coverage") != std::string::npos);

  ramp = json::parse(gaas::scenarios::builtin_config("casestudy_ramp"));
  ramp["policy"]["segments"][1]["t_start"] = 60;
  CHECK(parse_error(ramp).first == gaas::ErrorCode::InvariantViolation);

  ramp = json::parse(gaas::scenarios::builtin_config("casestudy_ramp"));
  ramp["policy"]["segments"][0]["coeffs"] = json::array({json::array({0, 1, 2, 3, 4})});
  CHECK(parse_error(ramp).first == gaas::ErrorCode::InvariantViolation);

  // Overlapping region interiors.
  doc = switched_doc();
  doc["policy"]["regions"][1]["hi"] = json::array({35});
  CHECK(parse_error(doc).first == gaas::ErrorCode::InvariantViolation);

  // Gap between regions.
  doc = switched_doc();
  doc["policy"]["regions"][1]["lo"] = json::array({21});
  CHECK(parse_error(doc).first == gaas::ErrorCode::InvariantViolation);
}

TEST_CASE("emit_config round trip") {
  for (const auto& name : gaas::scenarios::builtin_names()) {
    const auto s = gaas::parse_config(gaas::scenarios::builtin_config(name));
    const std::string text = gaas::emit_config(s);
    const auto back = gaas::parse_config(text);
    CHECK(back == s);
    CHECK(gaas::emit_config(back) == text);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = gaas::scenarios::random_scenario(seed);
    CHECK(gaas::parse_config(gaas::emit_config(s)) == s);
  }
}

TEST_CASE("validate_pair flags each dimension rule") {
  const auto s = testing::switched_case();
  gaas::AbstractLinearSystem big = s.abstract;
  big.A = Matrix(3, 3);
  big.B = Matrix(3, 1);
  big.C = Matrix(1, 3);
  auto v = gaas::validate_pair(s.concrete, big);
  CHECK_FALSE(v.state_dim_ok);
  CHECK(v.input_dim_ok);
  gaas::AbstractLinearSystem two_out = s.abstract;
  two_out.C = Matrix(2, 1);
  v = gaas::validate_pair(s.concrete, two_out);
  CHECK_FALSE(v.output_dim_ok);
  CHECK_FALSE(v.ok());
}

TEST_CASE("policy values and region lookup") {
  const auto sw = testing::switched_case();
  CHECK(sw.policy.locate(Vector{40.1}) == 0u);
  CHECK(sw.policy.locate(Vector{30.0}) == 0u);  // shared face: first match
  CHECK(sw.policy.locate(Vector{29.9}) == 1u);
  CHECK_FALSE(sw.policy.locate(Vector{50.0}).has_value());
  CHECK(gaas::policy_value(sw.policy, 0.0, Vector{40.0})[0] == doctest::Approx(-0.04));
  CHECK_THROWS_AS(gaas::policy_value(sw.policy, 0.0, Vector{-1.0}), gaas::Error);

  const auto ramp = testing::ramp_case();
  CHECK(gaas::policy_value(ramp.policy, 10.0, Vector{0.0})[0] == doctest::Approx(0.2));
  CHECK(gaas::policy_value(ramp.policy, 100.0, Vector{0.0})[0] == doctest::Approx(1.0));
  CHECK(ramp.policy.segment_at(50.0) == 1u);
  CHECK(ramp.policy.segment_at(49.999) == 0u);
}

TEST_CASE("policies jump only at declared breakpoints and region boundaries") {
  const auto sw = testing::switched_case();
  // Region faces at 10, 20, 30.
  const double faces[] = {10.0, 20.0, 30.0};
  int jumps = 0;
  double prev = gaas::policy_value(sw.policy, 0.0, Vector{0.0})[0];
  for (int i = 1; i <= 10000; ++i) {
    const double xh = 40.1 * i / 10000.0;
    const double u = gaas::policy_value(sw.policy, 0.0, Vector{xh})[0];
    const double lipschitz = 0.004 * 40.1 / 10000.0 * 1.01;
    if (std::abs(u - prev) > lipschitz) {
      ++jumps;
      bool near_face = false;
      for (double f : faces) near_face |= std::abs(xh - f) <= 40.1 / 10000.0 * 1.01;
      CHECK(near_face);
    }
    prev = u;
  }
  CHECK(jumps == 3);

  // Open-loop ramp: continuous everywhere (0.02 * 50 = 1).
  const auto ramp = testing::ramp_case();
  prev = gaas::policy_value(ramp.policy, 0.0, Vector{0.0})[0];
  for (int i = 1; i <= 10000; ++i) {
    const double t = 200.0 * i / 10000.0;
    const double u = gaas::policy_value(ramp.policy, t, Vector{0.0})[0];
    CHECK(std::abs(u - prev) <= 0.02 * 200.0 / 10000.0 * 1.0001);
    prev = u;
  }
}

TEST_CASE("load_config reports missing files as Io") {
  try {
    gaas::load_config("/nonexistent/scenario.json");
    FAIL("expected Io");
  } catch (const gaas::Error& e) {
    CHECK(e.code() == gaas::ErrorCode::Io);
  }
}
