#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gaas/model.hpp"
#include "gaas/refine.hpp"
#include "gaas/synthesis.hpp"

namespace gaas::sim {

struct PolicyEvaluation {
  Vector uhat;
  Vector uhatdot;  // analytic, never differenced
  std::size_t piece = 0;  // active segment or region
  std::optional<double> next_boundary;  // open loop: end of the active segment within lookahead
};

/// Abstract input and its time derivative at (t, xhat). For switched feedback
/// uhatdot = -Khat (Ahat xhat + Bhat uhat). Throws DomainGap.
PolicyEvaluation eval_policy(const AbstractInputPolicy& policy, const AbstractLinearSystem& abstract,
                             double t, std::span<const double> xhat,
                             double lookahead = std::numeric_limits<double>::infinity());

struct JumpRecord {
  JumpEvent event;
  Vector uhat_minus;
  Vector uhat_plus;
  Vector error_minus;  // e(tau-)
  Vector error_plus;   // e(tau+)
  double rbar_used = 0.0;  // sup of rbar1|xhat| + rbar2|uhat| + rbar3|uhatdot| on [t0, tau-]
  refine::JumpBudget budget;
  std::size_t sample_index = 0;
};

/// Sampled joint evolution. Per-sample vectors are stored flattened
/// (sample-major). The sample at a jump time holds the right limit.
struct TrajectoryRecord {
  std::size_t n = 0, m = 0, p = 0, nr = 0, mr = 0;
  double step = 0.0;
  double horizon = 0.0;
  Vector t;
  Vector x, xhat, uhat, uhatdot, u, y, yhat;
  Vector vg, err;
  std::vector<JumpRecord> jumps;
  bool initial_in_relation = true;
  double rbar_realized = 0.0;  // sup over the whole run

  std::size_t samples() const noexcept { return t.size(); }
  std::span<const double> x_at(std::size_t i) const { return {x.data() + i * n, n}; }
  std::span<const double> xhat_at(std::size_t i) const { return {xhat.data() + i * nr, nr}; }
  std::span<const double> uhat_at(std::size_t i) const { return {uhat.data() + i * mr, mr}; }
  std::span<const double> uhatdot_at(std::size_t i) const { return {uhatdot.data() + i * mr, mr}; }
  std::span<const double> u_at(std::size_t i) const { return {u.data() + i * m, m}; }
  std::span<const double> y_at(std::size_t i) const { return {y.data() + i * p, p}; }
  std::span<const double> yhat_at(std::size_t i) const { return {yhat.data() + i * p, p}; }
};

struct SimulationOptions {
  /// Store every k-th grid sample; t0, the final sample and every sample at
  /// a segment boundary or region crossing are always stored.
  std::size_t keep_every = 1;
};

/// Classical RK4 co-simulation of [x; xhat] with u from the interface and
/// uhat from the policy. Open-loop breakpoints land on the grid exactly;
/// region crossings are bisected to 1e-9 * horizon and the step is split.
/// Throws DomainGap, NonFiniteState, or ZenoJumps (jumps closer than 10 h).
TrajectoryRecord simulate(const Scenario& scenario, const RefinementGains& gains,
                          const SimulationOptions& options = {});

/// Initial concrete state: scenario.x0 or the lift of (xhat0, uhat(t0)).
Vector initial_state(const Scenario& scenario, const RefinementGains& gains);

struct CheckSummary {
  std::string name;
  double worst = 0.0;
  double bound = 0.0;
  std::size_t violations = 0;
  double first_violation_time = std::numeric_limits<double>::quiet_NaN();
};

struct VerificationReport {
  double max_output_error = 0.0;
  double max_vg = 0.0;
  double max_u = 0.0;
  double max_xhat = 0.0;
  double max_uhat = 0.0;
  double max_uhatdot = 0.0;
  std::size_t jump_count = 0;
  std::size_t jumps_passed = 0;
  std::size_t decay_violations = 0;
  double slack = 0.0;
  double rbar_max = 0.0;
  bool initial_in_relation = true;
  std::vector<CheckSummary> checks;
  bool passed = false;

  const CheckSummary* find(const std::string& name) const noexcept;
};

/// Trajectory-level checks at every stored sample: output error, vg and the
/// decay bound (each with `slack`), input ball, envelope, and re-evaluation
/// of every logged jump.
VerificationReport verify_trajectory(const TrajectoryRecord& record, const RefinementGains& gains,
                                     double epsilon, const OperatingEnvelope& envelope,
                                     double input_ball_radius, double rbar_max, double slack);

/// Integration slack kappa h^4 from a step-halving comparison: reruns at h/2
/// and takes 2 * (16/15) * max |vg_h - vg_{h/2}| over common sample times,
/// floored at round-off level.
double calibrate_decay_slack(const Scenario& scenario, const RefinementGains& gains,
                             const TrajectoryRecord& coarse);

void write_trajectory_csv(const TrajectoryRecord& record, std::ostream& out, std::size_t stride = 1);
void write_jumps_csv(const TrajectoryRecord& record, std::ostream& out);

}  // namespace gaas::sim
