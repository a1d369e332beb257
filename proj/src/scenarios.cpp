#include "gaas/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gaas/error.hpp"
#include "gaas/numerics.hpp"
#include "gaas/synthesis.hpp"

namespace gaas::scenarios {
namespace {

constexpr const char* kSwitched = R"({
  "concrete": {
    "A": [[0, 1], [0, 0]],
    "B": [[0], [1]],
    "C": [[1, 0]],
    "input_ball_radius": 0.6,
    "x0_box": {"lo": [39.5, -0.5], "hi": [40.5, 0.5]}
  },
  "abstract": {
    "A": [[0]],
    "B": [[1]],
    "C": [[1]],
    "x0_box": {"lo": [40.1], "hi": [40.1]}
  },
  "envelope": {"xhat_max": 40.1, "uhat_max": 0.0401, "uhatdot_max": 0.0486},
  "policy": {
    "kind": "switched_feedback",
    "regions": [
      {"lo": [30], "hi": [40.1], "gain": [[0.001]]},
      {"lo": [20], "hi": [30], "gain": [[0.0013]]},
      {"lo": [10], "hi": [20], "gain": [[0.002]]},
      {"lo": [0], "hi": [10], "gain": [[0.004]]}
    ]
  },
  "scenario": {
    "epsilon": 0.5,
    "a1": 0.5,
    "K": [[-1.3298, -1.4108]],
    "M": [[3.9544, 1.1805], [1.1805, 4.2262]],
    "horizon": 1000,
    "step": 0.001,
    "x0": [40, -0.0401],
    "xhat0": [40.1]
  }
})";

constexpr const char* kRamp = R"({
  "concrete": {
    "A": [[0, 1], [0, 0]],
    "B": [[0], [1]],
    "C": [[1, 0]],
    "input_ball_radius": 0.6,
    "x0_box": {"lo": [39.5, -0.5], "hi": [40.5, 0.5]}
  },
  "abstract": {
    "A": [[0]],
    "B": [[1]],
    "C": [[1]],
    "x0_box": {"lo": [40.1], "hi": [40.1]}
  },
  "envelope": {"xhat_max": 250, "uhat_max": 1, "uhatdot_max": 0.0486},
  "policy": {
    "kind": "open_loop",
    "segments": [
      {"t_start": 0, "t_end": 50, "coeffs": [[0, 0.02]]},
      {"t_start": 50, "t_end": 200, "coeffs": [[1]]}
    ]
  },
  "scenario": {
    "epsilon": 0.5,
    "a1": 0.5,
    "K": [[-1.3298, -1.4108]],
    "M": [[3.9544, 1.1805], [1.1805, 4.2262]],
    "horizon": 200,
    "step": 0.001,
    "x0": [40, 0],
    "xhat0": [40.1]
  }
})";

// Sum of |c_k| T^k: a bound on |p(t)| for t in [0, T].
double poly_bound(const Vector& c, double T) {
  double b = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) b += std::abs(c[k]) * std::pow(T, static_cast<double>(k));
  return b;
}

Vector derivative(const Vector& c) {
  Vector d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

double poly_at(const Vector& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"casestudy_switched", "casestudy_ramp"}; }

std::string builtin_config(std::string_view name) {
  if (name == "casestudy_switched") return kSwitched;
  if (name == "casestudy_ramp") return kRamp;
  throw Error(ErrorCode::InvalidArgument, "unknown built-in configuration: " + std::string(name));
}

Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);

  const std::size_t n = 2 + rng() % 2;
  Scenario s;
  auto& c = s.concrete;
  c.A = Matrix(n, n);
  c.B = Matrix(n, n);
  c.C = Matrix(1, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c.A(i, j) = uni(rng);
      c.B(i, j) = 0.3 * uni(rng);
    }
    c.B(i, i) += 1.5;
    c.C(0, i) = uni(rng);
  }
  c.C(0, 0) += 1.0;

  // Target closed loop: negative definite symmetric part, so Hurwitz.
  Matrix target(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    target(i, i) = -pos(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = 0.5 * uni(rng);
      target(i, j) = w;
      target(j, i) = -w;
    }
  }
  const Matrix K = numerics::solve_linear(c.B, target - c.A);

  auto& a = s.abstract;
  const double ahat = -0.5 * pos(rng);
  const double bhat = uni(rng);
  a.A = Matrix{{ahat}};
  a.B = Matrix{{bhat}};
  a.C = Matrix{{uni(rng)}};
  const double xhat0 = 2.0 * uni(rng);
  a.x0_box = Box{{xhat0}, {xhat0}};

  auto& p = s.params;
  p.horizon = 5.0;
  p.step = 1e-3;
  p.K = K;
  p.xhat0 = {xhat0};
  p.a1 = 0.5 * synthesis::max_feasible_a1(c.A, c.B, K);

  // Two continuous polynomial pieces; the derivative may jump at the break.
  const double t_break = 1.0 + 3.0 * (0.5 * (uni(rng) + 1.0));
  Vector c1{0.5 * uni(rng), 0.3 * uni(rng), 0.05 * uni(rng)};
  Vector c2{0.0, 0.2 * uni(rng)};
  c2[0] = poly_at(c1, t_break) - c2[1] * t_break;
  s.policy.kind = PolicyKind::OpenLoop;
  s.policy.segments = {PolySegment{0.0, t_break, {c1}}, PolySegment{t_break, p.horizon, {c2}}};

  const double uhat_max = std::max(poly_bound(c1, p.horizon), poly_bound(c2, p.horizon));
  const double uhatdot_max =
      std::max(poly_bound(derivative(c1), p.horizon), poly_bound(derivative(c2), p.horizon));
  // |xhat(t)| <= |xhat0| + |bhat| uhat_max t for a stable scalar abstraction.
  s.envelope = OperatingEnvelope{std::abs(xhat0) + std::abs(bhat) * uhat_max * p.horizon, uhat_max,
                                 uhatdot_max};

  c.input_ball_radius = 1.0;
  c.x0_box = Box{Vector(n, -1e3), Vector(n, 1e3)};
  p.epsilon = 1.0;
  const RefinementGains g = synthesis::synthesize(s);
  const auto feas = synthesis::feasibility(g.rbar1, g.rbar2, g.rbar3, s.envelope, p.a1, 1.0);
  p.epsilon = std::max(1.25 * feas.ratio, 0.05);
  const auto ib = synthesis::input_bound(g.K, g.Q, g.R, g.lambda_min_M, p.epsilon, s.envelope, 1.0);
  c.input_ball_radius = 1.5 * ib.b + 1e-3;

  Vector lift = g.P * a.x0_box.lo;
  const Vector su = g.S * Vector{poly_at(c1, 0.0)};
  for (std::size_t i = 0; i < n; ++i) lift[i] += su[i];
  Vector lo = lift, hi = lift;
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] -= 0.1;
    hi[i] += 0.1;
  }
  c.x0_box = Box{lo, hi};
  validate_scenario(s);
  return s;
}

}  // namespace gaas::scenarios
