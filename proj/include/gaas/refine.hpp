#pragma once

#include "gaas/matrix.hpp"
#include "gaas/synthesis.hpp"

namespace gaas {

/// A triple (x, xhat, uhat) of the relation's ambient space.
struct RelationPoint {
  Vector x;
  Vector xhat;
  Vector uhat;
};

namespace refine {

/// e = x - P xhat - S uhat.
Vector tracking_error(const RelationPoint& point, const RefinementGains& gains);

/// sqrt(e^T M e).
double vg(const RelationPoint& point, const RefinementGains& gains);

struct InterfaceOutput {
  Vector u;
  double norm = 0.0;
  bool exceeds_input_ball = false;  // reported, never clamped
};

/// u = K e + Q xhat + R uhat.
InterfaceOutput interface_u(const RelationPoint& point, const RefinementGains& gains,
                            double input_ball_radius);

/// x0 = P xhat0 + S uhat0 (the unique lift with vg = 0).
Vector lift_initial(std::span<const double> xhat0, std::span<const double> uhat0,
                    const RefinementGains& gains);

bool in_relation(const RelationPoint& point, const RefinementGains& gains, double epsilon);

/// exp(-a1 tau/2) vg0 + (1 - exp(-a1 tau/2)) 2 rbar_max / a1.
double omega(double tau, double vg0, double a1, double rbar_max);

struct JumpBudget {
  double lhs = 0.0;    // delta^T S^T M S delta
  double rhs = 0.0;    // (epsilon - sqrt(omega))^2, or 0 when omega > epsilon^2
  double omega = 0.0;
  bool pass = false;
};

/// Admissibility of an abstract-input jump `delta` at time tau.
JumpBudget jump_admissible(std::span<const double> delta, double tau, double vg0,
                           const RefinementGains& gains, double epsilon, double rbar_max);

}  // namespace refine
}  // namespace gaas
