#include "gaas/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gaas/error.hpp"
#include "gaas/numerics.hpp"
#include "gaas/refine.hpp"

namespace gaas {

bool ConditionReport::passed() const noexcept {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
}

const ConditionRecord* ConditionReport::find(const std::string& name) const noexcept {
  for (const auto& r : records)
    if (r.name == name) return &r;
  return nullptr;
}

namespace synthesis {
namespace {

using numerics::spectral_norm;

// Stacked least-squares problem over vectorized unknowns.
struct VecProblem {
  Matrix obj_map;
  Vector obj_rhs;
  Matrix eq_map;
  Vector eq_rhs;
};

// Unknowns [vec(P); vec(Q)].
VecProblem pq_problem(const Matrix& A, const Matrix& Ahat, const Matrix& B, const Matrix& C,
                      const Matrix& Chat, const Matrix& W) {
  const std::size_t n = A.rows(), nr = Ahat.rows(), m = B.cols();
  const Matrix Inr = Matrix::identity(nr);
  const Matrix p_block = kron(Inr, W * A) - kron(Ahat.transpose(), W);
  const Matrix q_block = kron(Inr, W * B);
  VecProblem vp;
  vp.obj_map = hstack(p_block, q_block);
  vp.obj_rhs = Vector(n * nr, 0.0);
  vp.eq_map = hstack(kron(Inr, C), Matrix(C.rows() * nr, m * nr));
  vp.eq_rhs = Chat.vec();
  return vp;
}

// Unknowns [vec(S); vec(R)], or vec(R) alone when S is forced to zero.
VecProblem sr_problem(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& P,
                      const Matrix& Bhat, const Matrix& W, bool force_s_zero) {
  const std::size_t mr = Bhat.cols();
  const Matrix Imr = Matrix::identity(mr);
  VecProblem vp;
  vp.obj_rhs = (W * (P * Bhat)).vec();
  if (force_s_zero) {
    vp.obj_map = kron(Imr, W * B);
    vp.eq_map = Matrix(0, vp.obj_map.cols());
    return vp;
  }
  vp.obj_map = hstack(kron(Imr, W * A), kron(Imr, W * B));
  vp.eq_map = hstack(kron(Imr, C), Matrix(C.rows() * mr, B.cols() * mr));
  vp.eq_rhs = Vector(C.rows() * mr, 0.0);
  return vp;
}

Vector concat(const Vector& a, const Vector& b) {
  Vector v = a;
  v.insert(v.end(), b.begin(), b.end());
  return v;
}

double objective(const VecProblem& vp, std::span<const double> z) {
  Vector r = vp.obj_map * z;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= vp.obj_rhs[i];
  return norm2(r);
}

// First-order optimality of z on the affine feasible set, plus comparison
// against a re-solve and random feasible perturbations.
ConditionRecord optimality_record(const std::string& name, const VecProblem& vp, const Vector& z) {
  ConditionRecord rec{name, 0.0, 1e-8, false, {}};
  const Matrix Z = numerics::null_space(vp.eq_map);
  Vector r = vp.obj_map * z;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= vp.obj_rhs[i];
  const double kkt = Z.cols() > 0 ? norm2((Z.transpose() * vp.obj_map.transpose()) * r) : 0.0;
  const double scale = vp.obj_map.frobenius_norm() *
                       (vp.obj_map.frobenius_norm() * norm2(z) + norm2(vp.obj_rhs));
  rec.value = scale > 0.0 ? kkt / scale : kkt;

  const double obj = norm2(r);
  const auto resolved = numerics::constrained_lstsq(vp.obj_map, vp.obj_rhs, vp.eq_map, vp.eq_rhs);
  const bool matches_resolve = obj <= resolved.objective + 1e-9 * (1.0 + resolved.objective);

  bool beats_perturbations = true;
  if (Z.cols() > 0) {
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 32 && beats_perturbations; ++trial) {
      Vector y(Z.cols());
      for (double& v : y) v = nd(rng);
      const double mag = (1.0 + norm2(z)) * std::pow(10.0, -3.0 + 3.0 * trial / 31.0) / norm2(y);
      Vector zp = Z * y;
      for (std::size_t i = 0; i < zp.size(); ++i) zp[i] = z[i] + mag * zp[i];
      if (objective(vp, zp) < obj - 1e-12 * (1.0 + obj)) beats_perturbations = false;
    }
  }
  rec.pass = rec.value <= rec.tolerance && matches_resolve && beats_perturbations;
  rec.detail = "relative projected-gradient residual (Frobenius surrogate); objective " +
               std::to_string(obj) + " vs re-solve " + std::to_string(resolved.objective) +
               (beats_perturbations ? "" : "; a random feasible perturbation improved the objective");
  return rec;
}

ConditionRecord bound_record(const std::string& name, double value, double tol, bool pass,
                             std::string detail) {
  return ConditionRecord{name, value, tol, pass, std::move(detail)};
}

Matrix closed_loop(const Matrix& A, const Matrix& B, const Matrix& K) { return A + B * K; }

}  // namespace

double max_feasible_a1(const Matrix& A, const Matrix& B, const Matrix& K) {
  const double abscissa = numerics::real_spectral_abscissa(closed_loop(A, B, K));
  if (abscissa >= 0.0) {
    throw Error(ErrorCode::NotStabilizing,
                "A + B K is not Hurwitz (spectral abscissa " + std::to_string(abscissa) + ")");
  }
  return -2.0 * abscissa;
}

LyapunovWeight synthesize_M(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& K,
                            double a1) {
  const double bound = max_feasible_a1(A, B, K);
  if (!(a1 < bound)) {
    throw Error(ErrorCode::InvalidArgument, "a1 = " + std::to_string(a1) +
                                                " is not below max_feasible_a1 = " +
                                                std::to_string(bound));
  }
  const std::size_t n = A.rows();
  const Matrix shifted = closed_loop(A, B, K) + Matrix::identity(n) * (0.5 * a1);
  Matrix m0 = numerics::solve_sylvester(shifted.transpose(), shifted, Matrix::identity(n) * -1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m0(i, j) = m0(j, i) = 0.5 * (m0(i, j) + m0(j, i));

  // lambda_max(M0^{-1/2} C^T C M0^{-1/2})
  const auto eig = numerics::sym_eig(m0);
  if (eig.values.front() <= 0.0) {
    throw Error(ErrorCode::NotPSD, "Lyapunov solution is not positive definite");
  }
  Matrix inv_sqrt(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eig.vectors(i, k) * eig.vectors(j, k) / std::sqrt(eig.values[k]);
      inv_sqrt(i, j) = s;
    }
  Matrix pencil = inv_sqrt * (C.transpose() * C) * inv_sqrt;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pencil(i, j) = pencil(j, i) = 0.5 * (pencil(i, j) + pencil(j, i));
  const double top = numerics::sym_eig(pencil).values.back();
  const double c = std::max(1.0, top * (1.0 + 1e-6));

  LyapunovWeight out;
  out.M = m0 * c;
  out.M_sqrt = numerics::psd_sqrt(out.M);
  out.lambda_min = numerics::sym_eig(out.M).values.front();
  return out;
}

PQSolution solve_PQ(const Matrix& A, const Matrix& Ahat, const Matrix& B, const Matrix& C,
                    const Matrix& Chat, const Matrix& M_sqrt) {
  const std::size_t n = A.rows(), nr = Ahat.rows(), m = B.cols();
  require_shape(Chat, C.rows(), nr, "solve_PQ(Chat)");
  const VecProblem vp = pq_problem(A, Ahat, B, C, Chat, M_sqrt);
  const auto sol = numerics::constrained_lstsq(vp.obj_map, vp.obj_rhs, vp.eq_map, vp.eq_rhs);
  const std::span<const double> z(sol.solution);
  PQSolution out;
  out.P = Matrix::unvec(z.subspan(0, n * nr), n, nr);
  out.Q = Matrix::unvec(z.subspan(n * nr, m * nr), m, nr);
  out.rbar1 = spectral_norm(M_sqrt * (A * out.P - out.P * Ahat + B * out.Q));
  return out;
}

SRSolution solve_SR(const Matrix& A, const Matrix& B, const Matrix& C, const Matrix& P,
                    const Matrix& Bhat, const Matrix& M_sqrt, bool force_s_zero) {
  const std::size_t n = A.rows(), m = B.cols(), mr = Bhat.cols();
  const VecProblem vp = sr_problem(A, B, C, P, Bhat, M_sqrt, force_s_zero);
  const auto sol = numerics::constrained_lstsq(vp.obj_map, vp.obj_rhs, vp.eq_map, vp.eq_rhs);
  const std::span<const double> z(sol.solution);
  SRSolution out;
  if (force_s_zero) {
    out.S = Matrix(n, mr);
    out.R = Matrix::unvec(z, m, mr);
  } else {
    out.S = Matrix::unvec(z.subspan(0, n * mr), n, mr);
    out.R = Matrix::unvec(z.subspan(n * mr, m * mr), m, mr);
  }
  out.rbar2 = spectral_norm(M_sqrt * (A * out.S + B * out.R - P * Bhat));
  return out;
}

double rbar3_of(const Matrix& M_sqrt, const Matrix& S) { return spectral_norm(M_sqrt * S); }

InputBound input_bound(const Matrix& K, const Matrix& Q, const Matrix& R, double lambda_min_M,
                       double epsilon, const OperatingEnvelope& envelope,
                       double input_ball_radius) {
  if (!(lambda_min_M > 0.0)) {
    return InputBound{std::numeric_limits<double>::infinity(), false};
  }
  InputBound out;
  out.b = spectral_norm(K) * epsilon / std::sqrt(lambda_min_M) +
          spectral_norm(Q) * envelope.xhat_max + spectral_norm(R) * envelope.uhat_max;
  out.pass = out.b <= input_ball_radius;
  return out;
}

Feasibility feasibility(double rbar1, double rbar2, double rbar3,
                        const OperatingEnvelope& envelope, double a1, double epsilon) {
  Feasibility f;
  f.rbar_max = rbar1 * envelope.xhat_max + rbar2 * envelope.uhat_max + rbar3 * envelope.uhatdot_max;
  f.ratio = 2.0 * f.rbar_max / a1;
  f.margin = epsilon - f.ratio;
  f.pass = f.ratio <= epsilon;
  return f;
}

void refresh_derived(RefinementGains& g, const Scenario& s) {
  const auto& c = s.concrete;
  const auto& a = s.abstract;
  g.a1 = s.params.a1;
  g.epsilon = s.params.epsilon;
  g.M_sqrt = numerics::psd_sqrt(g.M);
  g.lambda_min_M = numerics::sym_eig(g.M).values.front();
  g.rbar1 = spectral_norm(g.M_sqrt * (c.A * g.P - g.P * a.A + c.B * g.Q));
  g.rbar2 = spectral_norm(g.M_sqrt * (c.A * g.S + c.B * g.R - g.P * a.B));
  g.rbar3 = rbar3_of(g.M_sqrt, g.S);
  g.input_bound = input_bound(g.K, g.Q, g.R, g.lambda_min_M, g.epsilon, s.envelope,
                              c.input_ball_radius)
                      .b;
}

RefinementGains synthesize(const Scenario& s, bool force_s_zero) {
  const auto& c = s.concrete;
  const auto& a = s.abstract;
  RefinementGains g;
  g.K = s.params.K;
  g.s_forced_zero = force_s_zero;
  if (s.params.M) {
    g.M = *s.params.M;
  } else {
    const double bound = max_feasible_a1(c.A, c.B, g.K);
    const double a1 = s.params.a1 < bound ? s.params.a1 : 0.5 * bound;
    g.M = synthesize_M(c.A, c.B, c.C, g.K, a1).M;
  }
  const Matrix W = numerics::psd_sqrt(g.M);
  auto pq = solve_PQ(c.A, a.A, c.B, c.C, a.C, W);
  auto sr = solve_SR(c.A, c.B, c.C, pq.P, a.B, W, force_s_zero);
  g.P = std::move(pq.P);
  g.Q = std::move(pq.Q);
  g.S = std::move(sr.S);
  g.R = std::move(sr.R);
  refresh_derived(g, s);
  return g;
}

ConditionReport check_assumption(const Scenario& s, const RefinementGains& g) {
  const auto& c = s.concrete;
  const auto& a = s.abstract;
  const std::size_t n = c.n();
  ConditionReport rep;
  auto& recs = rep.records;

  const double cp = (c.C * g.P - a.C).frobenius_norm();
  recs.push_back(bound_record("cp_equals_chat", cp, 1e-9, cp <= 1e-9, "||C P - Chat||_F"));
  const double cs = (c.C * g.S).frobenius_norm();
  recs.push_back(bound_record("cs_zero", cs, 1e-9, cs <= 1e-9, "||C S||_F"));

  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) asym = std::max(asym, std::abs(g.M(i, j) - g.M(j, i)));
  const double m_scale = g.M.max_abs();
  recs.push_back(bound_record("m_symmetric", asym, 1e-12 * m_scale, asym <= 1e-12 * m_scale,
                              "max |M - M^T|"));

  Matrix msym = g.M;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) msym(i, j) = msym(j, i) = 0.5 * (g.M(i, j) + g.M(j, i));
  const auto meig = numerics::sym_eig(msym);
  const double lam_min = meig.values.front();
  const double lam_max = meig.values.back();
  recs.push_back(bound_record("m_positive_definite", lam_min, 0.0, lam_min > 0.0, "lambda_min(M) > 0"));
  const double gap = numerics::sym_eig(msym - c.C.transpose() * c.C).values.front();
  recs.push_back(bound_record("ctc_below_m", gap, -1e-9 * lam_max, gap >= -1e-9 * lam_max,
                              "lambda_min(M - C^T C) >= -1e-9 lambda_max(M)"));

  const Matrix acl = closed_loop(c.A, c.B, g.K);
  const double abscissa = numerics::real_spectral_abscissa(acl);
  recs.push_back(bound_record("k_stabilizing", abscissa, 0.0, abscissa < 0.0,
                              "max Re eig(A + B K) < 0"));
  rep.max_feasible_a1 = -2.0 * abscissa;
  recs.push_back(bound_record("a1_below_max_feasible", g.a1, rep.max_feasible_a1,
                              g.a1 < rep.max_feasible_a1, "a1 < -2 max Re eig(A + B K)"));

  Matrix lyap = acl.transpose() * msym + msym * acl + msym * g.a1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) lyap(i, j) = lyap(j, i) = 0.5 * (lyap(i, j) + lyap(j, i));
  const double decay = numerics::sym_eig(lyap).values.back();
  const double decay_tol = 1e-9 * numerics::spectral_norm(msym);
  recs.push_back(bound_record("lyapunov_decay", decay, decay_tol, decay <= decay_tol,
                              "lambda_max((A+BK)^T M + M(A+BK) + a1 M)"));

  const Matrix W = numerics::psd_sqrt(msym);
  recs.push_back(optimality_record("pq_optimality", pq_problem(c.A, a.A, c.B, c.C, a.C, W),
                                   concat(g.P.vec(), g.Q.vec())));
  const VecProblem srp = sr_problem(c.A, c.B, c.C, g.P, a.B, W, g.s_forced_zero);
  recs.push_back(optimality_record("sr_optimality", srp,
                                   g.s_forced_zero ? g.R.vec() : concat(g.S.vec(), g.R.vec())));
  if (g.s_forced_zero) {
    const double s_norm = g.S.frobenius_norm();
    recs.push_back(bound_record("s_forced_zero", s_norm, 0.0, s_norm == 0.0, "baseline interface requires S = 0"));
  }

  const double r3 = rbar3_of(W, g.S);
  recs.push_back(bound_record("rbar3_consistent", std::abs(r3 - g.rbar3), 1e-9,
                              std::abs(r3 - g.rbar3) <= 1e-9, "|rbar3 - ||M^{1/2} S|||"));

  const auto ib = input_bound(g.K, g.Q, g.R, lam_min, g.epsilon, s.envelope, c.input_ball_radius);
  rep.input_bound = ib.b;
  rep.input_ball_radius = c.input_ball_radius;
  recs.push_back(bound_record("input_bound", ib.b, c.input_ball_radius, ib.pass,
                              "||K|| eps / sqrt(lambda_min(M)) + ||Q|| xhat_max + ||R|| uhat_max <= input_ball_radius"));

  const auto f = feasibility(g.rbar1, g.rbar2, g.rbar3, s.envelope, g.a1, g.epsilon);
  rep.rbar_max = f.rbar_max;
  rep.feasibility_ratio = f.ratio;
  rep.feasibility_margin = f.margin;
  recs.push_back(bound_record("feasibility", f.ratio, g.epsilon, f.pass, "2 rbar_max / a1 <= epsilon"));

  // Every corner of the abstract initial box must lift into the concrete one.
  double worst = 0.0;
  bool lift_ok = true;
  std::string lift_detail = "lifted corners of abstract.x0_box lie in concrete.x0_box";
  for (const auto& corner : a.x0_box.corners()) {
    Vector uhat0;
    try {
      uhat0 = policy_value(s.policy, 0.0, corner);
    } catch (const Error& e) {
      lift_ok = false;
      lift_detail = std::string("no abstract input at an initial corner: ") + e.what();
      break;
    }
    const Vector x0 = refine::lift_initial(corner, uhat0, g);
    const auto& box = c.x0_box;
    for (std::size_t i = 0; i < n; ++i) {
      const double excess = std::max(box.lo[i] - x0[i], x0[i] - box.hi[i]);
      worst = std::max(worst, excess);
    }
  }
  double box_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    box_scale = std::max({box_scale, std::abs(c.x0_box.lo[i]), std::abs(c.x0_box.hi[i])});
  }
  const double lift_tol = 1e-9 * (1.0 + box_scale);
  lift_ok = lift_ok && worst <= lift_tol;
  recs.push_back(bound_record("lift_initial", worst, lift_tol, lift_ok, lift_detail));
  return rep;
}

}  // namespace synthesis
}  // namespace gaas
