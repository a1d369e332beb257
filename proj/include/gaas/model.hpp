#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaas/matrix.hpp"

namespace gaas {

/// Axis-aligned box; a point is a box with lo == hi.
struct Box {
  Vector lo;
  Vector hi;

  std::size_t dim() const noexcept { return lo.size(); }
  bool contains(std::span<const double> p, double tol = 0.0) const;
  Vector center() const;
  /// All 2^d corners (duplicates kept for degenerate axes).
  std::vector<Vector> corners() const;

  friend bool operator==(const Box&, const Box&) = default;
};

/// dx/dt = A x + B u, y = C x, with admissible inputs ||u|| <= input_ball_radius.
struct ConcreteLinearSystem {
  Matrix A, B, C;
  double input_ball_radius = 0.0;
  Box x0_box;

  std::size_t n() const noexcept { return A.rows(); }
  std::size_t m() const noexcept { return B.cols(); }
  std::size_t p() const noexcept { return C.rows(); }

  friend bool operator==(const ConcreteLinearSystem&, const ConcreteLinearSystem&) = default;
};

/// d(xhat)/dt = Ahat xhat + Bhat uhat, yhat = Chat xhat.
struct AbstractLinearSystem {
  Matrix A, B, C;
  Box x0_box;

  std::size_t n() const noexcept { return A.rows(); }
  std::size_t m() const noexcept { return B.cols(); }
  std::size_t p() const noexcept { return C.rows(); }

  friend bool operator==(const AbstractLinearSystem&, const AbstractLinearSystem&) = default;
};

/// Bounds on ||xhat||, ||uhat|| and ||d uhat/dt|| (between jumps).
struct OperatingEnvelope {
  double xhat_max = 0.0;
  double uhat_max = 0.0;
  double uhatdot_max = 0.0;

  friend bool operator==(const OperatingEnvelope&, const OperatingEnvelope&) = default;
};

/// uhat_i(t) = sum_k coeffs[i][k] t^k on [t_start, t_end), absolute time, degree <= 3.
struct PolySegment {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<Vector> coeffs;  // one coefficient list per input channel

  friend bool operator==(const PolySegment&, const PolySegment&) = default;
};

/// uhat = -gain * xhat while xhat lies in `box`.
struct FeedbackRegion {
  Box box;
  Matrix gain;  // m_r x n_r

  friend bool operator==(const FeedbackRegion&, const FeedbackRegion&) = default;
};

enum class PolicyKind { OpenLoop, SwitchedFeedback };

/// Piecewise abstract control. Switched-feedback regions are matched in
/// declaration order (first containing box wins), which lets closed boxes
/// share faces.
struct AbstractInputPolicy {
  PolicyKind kind = PolicyKind::OpenLoop;
  std::vector<PolySegment> segments;
  std::vector<FeedbackRegion> regions;

  /// Index of the first region containing xhat, or nullopt.
  std::optional<std::size_t> locate(std::span<const double> xhat) const;
  /// Index of the segment active at t (right-continuous), clamped to the ends.
  std::size_t segment_at(double t) const;

  friend bool operator==(const AbstractInputPolicy&, const AbstractInputPolicy&) = default;
};

enum class JumpCause { SegmentBoundary, RegionCrossing };
const char* to_string(JumpCause cause) noexcept;

/// Discontinuity of the abstract input: delta = uhat(tau+) - uhat(tau-).
struct JumpEvent {
  double time = 0.0;
  Vector delta;
  JumpCause cause = JumpCause::SegmentBoundary;
};

struct ScenarioParameters {
  double epsilon = 0.5;
  double a1 = 0.0;
  Matrix K;
  std::optional<Matrix> M;  // user-supplied simulation-function weight
  double horizon = 0.0;
  double step = 1e-3;
  std::optional<Vector> x0;  // lifted from xhat0 when absent
  Vector xhat0;

  friend bool operator==(const ScenarioParameters&, const ScenarioParameters&) = default;
};

struct Scenario {
  ConcreteLinearSystem concrete;
  AbstractLinearSystem abstract;
  OperatingEnvelope envelope;
  AbstractInputPolicy policy;
  ScenarioParameters params;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses and validates a JSON scenario document. Errors carry the offending
/// path, e.g. "SchemaError at scenario.K: missing required field".
Scenario parse_config(std::string_view document);
Scenario load_config(const std::string& path);
/// Canonical JSON rendering; parse_config(emit_config(s)) == s.
std::string emit_config(const Scenario& s, int indent = 2);

/// Re-runs every structural invariant (used after CLI overrides).
void validate_scenario(const Scenario& s);

struct PairValidation {
  bool state_dim_ok = false;   // n_r <= n
  bool input_dim_ok = false;   // m_r <= m
  bool output_dim_ok = false;  // rows(Chat) == rows(C)
  bool ok() const noexcept { return state_dim_ok && input_dim_ok && output_dim_ok; }
};

PairValidation validate_pair(const ConcreteLinearSystem& concrete,
                             const AbstractLinearSystem& abstract);

}  // namespace gaas

namespace gaas {

/// Abstract input at (t, xhat) using the piece active there (right limit at
/// breakpoints). Throws DomainGap when a switched-feedback state lies
/// outside every region.
Vector policy_value(const AbstractInputPolicy& policy, double t, std::span<const double> xhat);

}  // namespace gaas
