#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gaas/error.hpp"
#include "gaas/numerics.hpp"
#include "gaas/refine.hpp"
#include "gaas/sim.hpp"
#include "gaas/synthesis.hpp"
#include "support.hpp"

using gaas::Matrix;
using gaas::Vector;
namespace sim = gaas::sim;
namespace syn = gaas::synthesis;

namespace {

double envelope_rbar(const gaas::Scenario& s, const gaas::RefinementGains& g) {
  return syn::feasibility(g.rbar1, g.rbar2, g.rbar3, s.envelope, g.a1, s.params.epsilon).rbar_max;
}

// Zero dynamics, zero policy, exact lift: both systems at rest.
gaas::Scenario rest_scenario() {
  auto s = testing::ramp_case();
  s.concrete.A = Matrix(2, 2);
  s.concrete.B = Matrix::identity(2);
  s.abstract.A = Matrix{{0}};
  s.policy.segments = {gaas::PolySegment{0.0, 10.0, {{0.0}}}};
  s.params.horizon = 10.0;
  s.params.step = 0.01;
  s.params.K = -1.0 * Matrix::identity(2);
  s.params.M.reset();
  s.params.a1 = 0.5;
  s.params.x0.reset();
  return s;
}

}  // namespace

TEST_CASE("eval_policy examples") {
  const auto ramp = testing::ramp_case();
  auto ev = sim::eval_policy(ramp.policy, ramp.abstract, 10.0, Vector{0.0});
  CHECK(ev.uhat[0] == doctest::Approx(0.2));
  CHECK(ev.uhatdot[0] == doctest::Approx(0.02));
  CHECK(ev.next_boundary.value() == doctest::Approx(50.0));
  ev = sim::eval_policy(ramp.policy, ramp.abstract, 10.0, Vector{0.0}, 1.0);
  CHECK_FALSE(ev.next_boundary.has_value());
  ev = sim::eval_policy(ramp.policy, ramp.abstract, 100.0, Vector{0.0});
  CHECK(ev.uhatdot[0] == 0.0);

  const auto sw = testing::switched_case();
  ev = sim::eval_policy(sw.policy, sw.abstract, 0.0, Vector{40.0});
  CHECK(ev.uhat[0] == doctest::Approx(-0.04));
  CHECK(ev.uhatdot[0] == doctest::Approx(4e-5));
  CHECK_THROWS_AS(sim::eval_policy(sw.policy, sw.abstract, 0.0, Vector{41.0}), gaas::Error);
}

TEST_CASE("zero dynamics keep every state constant") {
  const auto s = rest_scenario();
  const auto g = syn::synthesize(s);
  const auto rec = sim::simulate(s, g);
  CHECK(rec.samples() == 1001);
  const auto x0 = rec.x_at(0);
  for (std::size_t i = 0; i < rec.samples(); ++i) {
    CHECK(rec.x_at(i)[0] == x0[0]);
    CHECK(rec.x_at(i)[1] == x0[1]);
    CHECK(rec.xhat_at(i)[0] == 40.1);
    CHECK(rec.vg[i] <= 1e-12);
  }
}

TEST_CASE("record invariants: grid, outputs and horizon coverage") {
  auto s = testing::switched_case();
  s.params.horizon = 50.0;
  const auto g = syn::synthesize(s);
  const auto rec = sim::simulate(s, g);
  CHECK(rec.t.front() == 0.0);
  CHECK(rec.t.back() == doctest::Approx(50.0).epsilon(1e-15));
  for (std::size_t i = 1; i < rec.samples(); ++i) {
    CHECK(rec.t[i] > rec.t[i - 1]);
    CHECK(rec.t[i] - rec.t[i - 1] <= s.params.step * (1 + 1e-9));
  }
  for (std::size_t i = 0; i < rec.samples(); i += 997) {
    const Vector y = s.concrete.C * rec.x_at(i);
    const Vector yh = s.abstract.C * rec.xhat_at(i);
    CHECK(std::abs(y[0] - rec.y_at(i)[0]) <= 1e-12);
    CHECK(std::abs(yh[0] - rec.yhat_at(i)[0]) <= 1e-12);
    CHECK(std::abs(rec.err[i] - std::abs(y[0] - yh[0])) <= 1e-12);
  }
}

TEST_CASE("case-study switched run: three crossings, all within epsilon") {
  const auto s = testing::switched_case();
  const auto g = syn::synthesize(s);
  const auto rec = sim::simulate(s, g);
  REQUIRE(rec.jumps.size() == 3);
  const double expected_delta[] = {-0.009, -0.014, -0.02};
  const double faces[] = {30.0, 20.0, 10.0};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& j = rec.jumps[k];
    CHECK(j.event.cause == gaas::JumpCause::RegionCrossing);
    CHECK(j.event.delta[0] == doctest::Approx(expected_delta[k]).epsilon(1e-6));
    // Jump time on the grid, right limit stored, xhat on the face.
    CHECK(rec.t[j.sample_index] == j.event.time);
    CHECK(rec.uhat_at(j.sample_index)[0] == doctest::Approx(j.uhat_plus[0]));
    CHECK(rec.xhat_at(j.sample_index)[0] == doctest::Approx(faces[k]).epsilon(1e-8));
    // Jump consistency: uhat and e jump by delta and -S delta.
    CHECK(std::abs(j.uhat_plus[0] - j.uhat_minus[0] - j.event.delta[0]) <= 1e-12);
    for (std::size_t i = 0; i < 2; ++i) {
      const double se = (g.S * j.event.delta)[i];
      CHECK(std::abs(j.error_plus[i] - (j.error_minus[i] - se)) <= 1e-12);
    }
    CHECK(j.budget.pass);
  }
  // Crossing times from xhat(t) = 40.1 exp(-k t) piecewise.
  const double t1 = std::log(40.1 / 30.0) / 0.001;
  CHECK(rec.jumps[0].event.time == doctest::Approx(t1).epsilon(1e-5));

  const auto v = sim::verify_trajectory(rec, g, 0.5, s.envelope, 0.6, envelope_rbar(s, g),
                                        sim::calibrate_decay_slack(s, g, rec));
  CHECK(v.passed);
  CHECK(v.max_output_error <= 0.5);
  CHECK(v.max_vg <= 0.5);
  CHECK(v.jumps_passed == 3);
  CHECK(v.decay_violations == 0);
}

TEST_CASE("ramp: full interface within epsilon, S = 0 baseline exceeds it") {
  const auto s = testing::ramp_case();
  const auto g = syn::synthesize(s);
  const auto base = syn::synthesize(s, true);
  const auto rec = sim::simulate(s, g);
  const auto rec_b = sim::simulate(s, base);
  const auto v = sim::verify_trajectory(rec, g, 0.5, s.envelope, 0.6, envelope_rbar(s, g), 1e-9);
  const auto vb = sim::verify_trajectory(rec_b, base, 0.5, s.envelope, 0.6, envelope_rbar(s, base), 1e-9);
  CHECK(rec.jumps.empty());
  CHECK(v.max_output_error <= 0.5);
  CHECK(v.passed);
  CHECK(vb.max_output_error > 0.5);
  CHECK_FALSE(vb.passed);
  const auto* c = vb.find("output_error");
  REQUIRE(c != nullptr);
  CHECK(c->violations > 0);
  CHECK(c->first_violation_time > 0.0);
}

TEST_CASE("verification locates an injected violation") {
  auto s = testing::switched_case();
  s.params.horizon = 20.0;
  const auto g = syn::synthesize(s);
  auto rec = sim::simulate(s, g);
  rec.vg[1234] = 0.51;
  const auto v = sim::verify_trajectory(rec, g, 0.5, s.envelope, 0.6, envelope_rbar(s, g), 1e-9);
  CHECK_FALSE(v.passed);
  const auto* c = v.find("vg");
  REQUIRE(c != nullptr);
  CHECK(c->violations == 1);
  CHECK(c->first_violation_time == doctest::Approx(rec.t[1234]));
}

TEST_CASE("initial state outside the relation is reported") {
  auto s = testing::switched_case();
  s.params.horizon = 5.0;
  s.params.epsilon = 0.15;
  const auto g = syn::synthesize(s);
  const auto rec = sim::simulate(s, g);
  CHECK_FALSE(rec.initial_in_relation);
  const auto v = sim::verify_trajectory(rec, g, 0.15, s.envelope, 0.6, envelope_rbar(s, g), 1e-9);
  CHECK_FALSE(v.passed);
  CHECK(v.find("initial_relation")->violations == 1);
}

TEST_CASE("horizon zero gives a single sample") {
  auto s = testing::switched_case();
  s.params.horizon = 0.0;
  const auto g = syn::synthesize(s);
  const auto rec = sim::simulate(s, g);
  CHECK(rec.samples() == 1);
  CHECK(sim::verify_trajectory(rec, g, 0.5, s.envelope, 0.6, envelope_rbar(s, g), 0.0).passed);
}

TEST_CASE("segment-boundary jumps land on the grid and are logged") {
  auto s = testing::ramp_case();
  s.policy.segments[1].coeffs = {{0.9}};  // 1.0 -> 0.9 at t = 50
  s.policy.segments[0].t_end = 50.0004;   // off-grid breakpoint
  s.policy.segments[1].t_start = 50.0004;
  s.params.horizon = 60.0;
  const auto g = syn::synthesize(s);
  const auto rec = sim::simulate(s, g);
  REQUIRE(rec.jumps.size() == 1);
  const auto& j = rec.jumps[0];
  CHECK(j.event.cause == gaas::JumpCause::SegmentBoundary);
  CHECK(j.event.time == 50.0004);
  CHECK(rec.t[j.sample_index] == 50.0004);
  CHECK(j.event.delta[0] == doctest::Approx(0.9 - 0.02 * 50.0004).epsilon(1e-12));
}

TEST_CASE("Zeno jumps and divergence are errors") {
  auto s = testing::ramp_case();
  s.params.horizon = 1.0;
  s.params.step = 0.01;
  s.policy.segments = {gaas::PolySegment{0.0, 0.5, {{0.0}}}, gaas::PolySegment{0.5, 0.55, {{1.0}}},
                       gaas::PolySegment{0.55, 1.0, {{0.0}}}};
  const auto g = syn::synthesize(s);
  try {
    sim::simulate(s, g);
    FAIL("expected ZenoJumps");
  } catch (const gaas::Error& e) {
    CHECK(e.code() == gaas::ErrorCode::ZenoJumps);
  }

  auto d = testing::ramp_case();
  d.params.horizon = 200.0;
  d.params.step = 0.5;
  auto gd = syn::synthesize(d);
  gd.K = Matrix{{1e3, 1e3}};
  try {
    sim::simulate(d, gd);
    FAIL("expected NonFiniteState");
  } catch (const gaas::Error& e) {
    CHECK(e.code() == gaas::ErrorCode::NonFiniteState);
  }
}

TEST_CASE("RK4 step halving on a smooth window") {
  auto s = testing::ramp_case();
  s.params.horizon = 4.0;  // transient still dominates roundoff
  s.params.x0 = Vector{41.0, 0.3};
  const auto g = syn::synthesize(s);
  const auto terminal = [&](double h) {
    auto c = s;
    c.params.step = h;
    const auto r = sim::simulate(c, g, sim::SimulationOptions{1000000});
    const auto x = r.x_at(r.samples() - 1);
    return Vector{x[0], x[1]};
  };
  const double h = 0.1;
  const Vector ref = terminal(h / 8);
  const Vector a = terminal(h), b = terminal(h / 2);
  const double ea = std::hypot(a[0] - ref[0], a[1] - ref[1]);
  const double eb = std::hypot(b[0] - ref[0], b[1] - ref[1]);
  const double factor = ea / eb;
  INFO("factor " << factor);
  CHECK(factor >= 12.0);
  CHECK(factor <= 20.0);
}

TEST_CASE("deterministic CSV output and thinning") {
  auto s = testing::switched_case();
  s.params.horizon = 300.0;
  s.params.step = 0.01;
  const auto g = syn::synthesize(s);
  std::ostringstream a, b, thin, jumps;
  sim::write_trajectory_csv(sim::simulate(s, g), a);
  const auto rec = sim::simulate(s, g);
  sim::write_trajectory_csv(rec, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("t,x1,x2,xhat1,uhat1,uhatdot1,u1,y1,yhat1,vg,err\n", 0) == 0);
  sim::write_trajectory_csv(rec, thin, 1000);
  std::size_t rows = 0;
  for (char c : thin.str()) rows += c == '\n';
  // header + every 1000th + the jump sample + the last sample
  CHECK(rows == 1 + (rec.samples() - 1) / 1000 + 1 + 1 + 1);
  sim::write_jumps_csv(rec, jumps);
  CHECK(jumps.str().rfind("tau,delta1,lhs,rhs,pass\n", 0) == 0);
  CHECK(jumps.str().find(",1\n") != std::string::npos);
}
