#include "gaas/refine.hpp"

#include <cmath>

#include "gaas/error.hpp"

namespace gaas::refine {

Vector tracking_error(const RelationPoint& pt, const RefinementGains& g) {
  if (pt.x.size() != g.P.rows() || pt.xhat.size() != g.P.cols() || pt.uhat.size() != g.S.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "relation point does not match the gains");
  }
  Vector e = pt.x;
  const Vector px = g.P * pt.xhat;
  const Vector su = g.S * pt.uhat;
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= px[i] + su[i];
  return e;
}

double vg(const RelationPoint& pt, const RefinementGains& g) {
  const Vector e = tracking_error(pt, g);
  return std::sqrt(std::max(0.0, dot(e, g.M * e)));
}

InterfaceOutput interface_u(const RelationPoint& pt, const RefinementGains& g,
                            double input_ball_radius) {
  const Vector e = tracking_error(pt, g);
  InterfaceOutput out;
  out.u = g.K * e;
  const Vector qx = g.Q * pt.xhat;
  const Vector ru = g.R * pt.uhat;
  for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i] += qx[i] + ru[i];
  out.norm = norm2(out.u);
  out.exceeds_input_ball = out.norm > input_ball_radius;
  return out;
}

Vector lift_initial(std::span<const double> xhat0, std::span<const double> uhat0,
                    const RefinementGains& g) {
  Vector x0 = g.P * xhat0;
  const Vector su = g.S * uhat0;
  for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += su[i];
  return x0;
}

bool in_relation(const RelationPoint& pt, const RefinementGains& g, double epsilon) {
  return vg(pt, g) <= epsilon;
}

double omega(double tau, double vg0, double a1, double rbar_max) {
  if (tau < 0.0) throw Error(ErrorCode::InvalidArgument, "omega: tau must be >= 0");
  const double decay = std::exp(-0.5 * a1 * tau);
  return decay * vg0 + (1.0 - decay) * 2.0 * rbar_max / a1;
}

JumpBudget jump_admissible(std::span<const double> delta, double tau, double vg0,
                           const RefinementGains& g, double epsilon, double rbar_max) {
  JumpBudget out;
  const Vector sd = g.S * delta;
  out.lhs = dot(sd, g.M * sd);
  out.omega = omega(tau, vg0, g.a1, rbar_max);
  if (out.omega <= epsilon * epsilon) {
    const double slack = epsilon - std::sqrt(out.omega);
    out.rhs = slack * slack;
    out.pass = out.lhs <= out.rhs;
  } else {
    out.rhs = 0.0;
    out.pass = false;
  }
  return out;
}

}  // namespace gaas::refine
