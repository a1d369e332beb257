#pragma once

#include <string>
#include <vector>

#include "gaas/matrix.hpp"
#include "gaas/model.hpp"

namespace gaas {

/// Everything defining the simulation function
///   V(x, xhat, uhat) = sqrt(e^T M e),  e = x - P xhat - S uhat
/// and the interface  u = K e + Q xhat + R uhat.
struct RefinementGains {
  Matrix M, M_sqrt, K, P, Q, S, R;
  double a1 = 0.0;
  double epsilon = 0.0;
  double rbar1 = 0.0;
  double rbar2 = 0.0;
  double rbar3 = 0.0;
  double lambda_min_M = 0.0;
  double input_bound = 0.0;
  bool s_forced_zero = false;  // baseline interface (S = 0)
};

struct ConditionRecord {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ConditionReport {
  std::vector<ConditionRecord> records;
  // Quantities surfaced alongside the records.
  double max_feasible_a1 = 0.0;
  double rbar_max = 0.0;
  double feasibility_ratio = 0.0;  // 2 rbar_max / a1
  double feasibility_margin = 0.0;
  double input_bound = 0.0;
  double input_ball_radius = 0.0;

  bool passed() const noexcept;
  const ConditionRecord* find(const std::string& name) const noexcept;
};

namespace synthesis {

/// Supremum of admissible decay rates: -2 * max Re(eig(A + B K)).
/// Throws NotStabilizing when A + B K is not Hurwitz.
double max_feasible_a1(const Matrix& A, const Matrix& B, const Matrix& K);

struct LyapunovWeight {
  Matrix M;
  Matrix M_sqrt;
  double lambda_min = 0.0;
};

/// Lyapunov solve (A_cl + a1/2 I)^T M0 + M0 (A_cl + a1/2 I) = -I, then the
/// smallest scaling c >= 1 with C^T C <= c M0 (plus 1e-6 relative headroom).
LyapunovWeight synthesize_M(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& K,
                            double a1);

struct PQSolution {
  Matrix P, Q;
  double rbar1 = 0.0;
};

/// argmin ||M^{1/2}(A P - P Ahat + B Q)||_F subject to C P = Chat (minimum norm).
PQSolution solve_PQ(const Matrix& A, const Matrix& Ahat, const Matrix& B, const Matrix& C,
                    const Matrix& Chat, const Matrix& M_sqrt);

struct SRSolution {
  Matrix S, R;
  double rbar2 = 0.0;
};

/// argmin ||M^{1/2}(A S + B R - P Bhat)||_F subject to C S = 0. With
/// force_s_zero the minimization runs over R only and S = 0.
SRSolution solve_SR(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& P,
                    const Matrix& Bhat, const Matrix& M_sqrt, bool force_s_zero = false);

double rbar3_of(const Matrix& M_sqrt, const Matrix& S);

struct InputBound {
  double b = 0.0;
  bool pass = false;  // b <= input_ball_radius
};

/// b = ||K|| eps / sqrt(lambda_min(M)) + ||Q|| xhat_max + ||R|| uhat_max.
InputBound input_bound(const Matrix& K, const Matrix& Q, const Matrix& R, double lambda_min_M,
                       double epsilon, const OperatingEnvelope& envelope,
                       double input_ball_radius);

struct Feasibility {
  double rbar_max = 0.0;
  double ratio = 0.0;   // 2 rbar_max / a1
  double margin = 0.0;  // epsilon - ratio
  bool pass = false;
};

Feasibility feasibility(double rbar1, double rbar2, double rbar3,
                        const OperatingEnvelope& envelope, double a1, double epsilon);

/// Full pipeline: M (user-supplied or synthesized), P, Q, S, R and every
/// derived scalar. When a1 is at or above max_feasible_a1 and M must be
/// synthesized, M is built for a1/2 of the bound so the report can still be
/// produced; the decay record then fails.
RefinementGains synthesize(const Scenario& scenario, bool force_s_zero = false);

/// Recomputes M_sqrt, lambda_min_M, r-bar coefficients and the input bound
/// from the matrices in `gains`, taking a1 and epsilon from the scenario.
void refresh_derived(RefinementGains& gains, const Scenario& scenario);

ConditionReport check_assumption(const Scenario& scenario, const RefinementGains& gains);

}  // namespace synthesis
}  // namespace gaas
