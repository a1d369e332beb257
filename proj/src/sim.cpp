#include "gaas/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gaas/error.hpp"
#include "gaas/numerics.hpp"

namespace gaas::sim {
namespace {

// out (+)= alpha * a * v over raw buffers.
inline void gemv(const Matrix& a, const double* v, double* out, double alpha, bool accumulate) {
  const std::size_t r = a.rows(), c = a.cols();
  const double* p = a.data().data();
  for (std::size_t i = 0; i < r; ++i, p += c) {
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += p[j] * v[j];
    out[i] = accumulate ? out[i] + alpha * s : alpha * s;
  }
}

inline double poly(const Vector& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
  return v;
}

inline double poly_derivative(const Vector& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
  return v;
}

inline double raw_norm(const double* v, std::size_t n) { return norm2(std::span<const double>(v, n)); }

// Joint right-hand side for z = [x; xhat] with the policy piece held fixed.
class JointSystem {
 public:
  JointSystem(const Scenario& s, const RefinementGains& g)
      : s_(s), g_(g), n_(s.concrete.n()), nr_(s.abstract.n()), m_(s.concrete.m()),
        mr_(s.abstract.m()), uh_(mr_), e_(n_), u_(m_), tmp_(std::max(n_, mr_)) {}

  std::size_t dim() const { return n_ + nr_; }

  void uhat(double t, const double* xhat, std::size_t piece, double* out) const {
    const auto& pol = s_.policy;
    if (pol.kind == PolicyKind::OpenLoop) {
      if (pol.segments.empty()) {
        std::fill(out, out + mr_, 0.0);
        return;
      }
      const auto& seg = pol.segments[piece];
      for (std::size_t c = 0; c < mr_; ++c) out[c] = poly(seg.coeffs[c], t);
    } else {
      gemv(pol.regions[piece].gain, xhat, out, -1.0, false);
    }
  }

  void uhatdot(double t, const double* xhat, const double* uh, std::size_t piece, double* out) {
    const auto& pol = s_.policy;
    if (pol.kind == PolicyKind::OpenLoop) {
      if (pol.segments.empty()) {
        std::fill(out, out + mr_, 0.0);
        return;
      }
      const auto& seg = pol.segments[piece];
      for (std::size_t c = 0; c < mr_; ++c) out[c] = poly_derivative(seg.coeffs[c], t);
    } else {
      gemv(s_.abstract.A, xhat, tmp_.data(), 1.0, false);
      gemv(s_.abstract.B, uh, tmp_.data(), 1.0, true);
      gemv(pol.regions[piece].gain, tmp_.data(), out, -1.0, false);
    }
  }

  // e = x - P xhat - S uhat ; u = K e + Q xhat + R uhat
  void error_and_input(const double* x, const double* xhat, const double* uh, double* e,
                       double* u) const {
    std::copy(x, x + n_, e);
    gemv(g_.P, xhat, e, -1.0, true);
    gemv(g_.S, uh, e, -1.0, true);
    gemv(g_.K, e, u, 1.0, false);
    gemv(g_.Q, xhat, u, 1.0, true);
    gemv(g_.R, uh, u, 1.0, true);
  }

  void derivative(double t, const double* z, std::size_t piece, double* dz) {
    const double* x = z;
    const double* xh = z + n_;
    uhat(t, xh, piece, uh_.data());
    error_and_input(x, xh, uh_.data(), e_.data(), u_.data());
    gemv(s_.concrete.A, x, dz, 1.0, false);
    gemv(s_.concrete.B, u_.data(), dz, 1.0, true);
    gemv(s_.abstract.A, xh, dz + n_, 1.0, false);
    gemv(s_.abstract.B, uh_.data(), dz + n_, 1.0, true);
  }

 private:
  const Scenario& s_;
  const RefinementGains& g_;
  std::size_t n_, nr_, m_, mr_;
  Vector uh_, e_, u_, tmp_;
};

class Rk4 {
 public:
  explicit Rk4(JointSystem& sys)
      : sys_(sys), k1_(sys.dim()), k2_(sys.dim()), k3_(sys.dim()), k4_(sys.dim()), tmp_(sys.dim()) {}

  void step(double t, const Vector& z, double h, std::size_t piece, Vector& out) {
    const std::size_t d = z.size();
    sys_.derivative(t, z.data(), piece, k1_.data());
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = z[i] + 0.5 * h * k1_[i];
    sys_.derivative(t + 0.5 * h, tmp_.data(), piece, k2_.data());
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = z[i] + 0.5 * h * k2_[i];
    sys_.derivative(t + 0.5 * h, tmp_.data(), piece, k3_.data());
    for (std::size_t i = 0; i < d; ++i) tmp_[i] = z[i] + h * k3_[i];
    sys_.derivative(t + h, tmp_.data(), piece, k4_.data());
    out.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      out[i] = z[i] + h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  JointSystem& sys_;
  Vector k1_, k2_, k3_, k4_, tmp_;
};

// Per-sample derived quantities at (t, z, piece).
struct SampleValues {
  Vector uh, uhd, e, u, y, yh;
  double vg = 0.0;
  double err = 0.0;
  double rbar = 0.0;
};

class Sampler {
 public:
  Sampler(const Scenario& s, const RefinementGains& g, JointSystem& sys)
      : s_(s), g_(g), sys_(sys), n_(s.concrete.n()), nr_(s.abstract.n()) {
    v_.uh.resize(s.abstract.m());
    v_.uhd.resize(s.abstract.m());
    v_.e.resize(n_);
    v_.u.resize(s.concrete.m());
    v_.y.resize(s.concrete.p());
    v_.yh.resize(s.concrete.p());
    me_.resize(n_);
  }

  const SampleValues& eval(double t, const Vector& z, std::size_t piece) {
    const double* x = z.data();
    const double* xh = z.data() + n_;
    sys_.uhat(t, xh, piece, v_.uh.data());
    sys_.uhatdot(t, xh, v_.uh.data(), piece, v_.uhd.data());
    sys_.error_and_input(x, xh, v_.uh.data(), v_.e.data(), v_.u.data());
    gemv(s_.concrete.C, x, v_.y.data(), 1.0, false);
    gemv(s_.abstract.C, xh, v_.yh.data(), 1.0, false);
    gemv(g_.M, v_.e.data(), me_.data(), 1.0, false);
    double q = 0.0;
    for (std::size_t i = 0; i < n_; ++i) q += v_.e[i] * me_[i];
    v_.vg = std::sqrt(std::max(0.0, q));
    double d2 = 0.0;
    for (std::size_t i = 0; i < v_.y.size(); ++i) {
      const double d = v_.y[i] - v_.yh[i];
      d2 += d * d;
    }
    v_.err = std::sqrt(d2);
    v_.rbar = g_.rbar1 * raw_norm(xh, nr_) + g_.rbar2 * norm2(v_.uh) + g_.rbar3 * norm2(v_.uhd);
    return v_;
  }

 private:
  const Scenario& s_;
  const RefinementGains& g_;
  JointSystem& sys_;
  std::size_t n_, nr_;
  SampleValues v_;
  Vector me_;
};

void append(Vector& dst, const double* src, std::size_t n) { dst.insert(dst.end(), src, src + n); }

void store(TrajectoryRecord& rec, double t, const Vector& z, const SampleValues& v) {
  rec.t.push_back(t);
  append(rec.x, z.data(), rec.n);
  append(rec.xhat, z.data() + rec.n, rec.nr);
  append(rec.uhat, v.uh.data(), rec.mr);
  append(rec.uhatdot, v.uhd.data(), rec.mr);
  append(rec.u, v.u.data(), rec.m);
  append(rec.y, v.y.data(), rec.p);
  append(rec.yhat, v.yh.data(), rec.p);
  rec.vg.push_back(v.vg);
  rec.err.push_back(v.err);
}

std::size_t initial_piece(const AbstractInputPolicy& pol, std::span<const double> xhat0) {
  if (pol.kind == PolicyKind::OpenLoop) return pol.segments.empty() ? 0 : pol.segment_at(0.0);
  const auto idx = pol.locate(xhat0);
  if (!idx) throw Error(ErrorCode::DomainGap, "initial abstract state outside every policy region");
  return *idx;
}

}  // namespace

PolicyEvaluation eval_policy(const AbstractInputPolicy& policy, const AbstractLinearSystem& abstract,
                             double t, std::span<const double> xhat, double lookahead) {
  PolicyEvaluation out;
  const std::size_t mr = abstract.m();
  out.uhat.assign(mr, 0.0);
  out.uhatdot.assign(mr, 0.0);
  if (policy.kind == PolicyKind::OpenLoop) {
    if (policy.segments.empty()) return out;
    out.piece = policy.segment_at(t);
    const auto& seg = policy.segments[out.piece];
    for (std::size_t c = 0; c < mr; ++c) {
      out.uhat[c] = poly(seg.coeffs[c], t);
      out.uhatdot[c] = poly_derivative(seg.coeffs[c], t);
    }
    if (out.piece + 1 < policy.segments.size() && seg.t_end <= t + lookahead) {
      out.next_boundary = seg.t_end;
    }
    return out;
  }
  const auto idx = policy.locate(xhat);
  if (!idx) throw Error(ErrorCode::DomainGap, "abstract state outside every policy region");
  out.piece = *idx;
  const Matrix& gain = policy.regions[*idx].gain;
  out.uhat = gain * xhat;
  for (double& v : out.uhat) v = -v;
  Vector drift = abstract.A * xhat;
  const Vector bu = abstract.B * out.uhat;
  for (std::size_t i = 0; i < drift.size(); ++i) drift[i] += bu[i];
  out.uhatdot = gain * drift;
  for (double& v : out.uhatdot) v = -v;
  return out;
}

Vector initial_state(const Scenario& s, const RefinementGains& g) {
  if (s.params.x0) return *s.params.x0;
  const Vector uhat0 = policy_value(s.policy, 0.0, s.params.xhat0);
  return refine::lift_initial(s.params.xhat0, uhat0.empty() ? Vector(s.abstract.m(), 0.0) : uhat0, g);
}

TrajectoryRecord simulate(const Scenario& s, const RefinementGains& g, const SimulationOptions& opt) {
  const double h = s.params.step;
  const double t0 = 0.0;
  const double t_end = t0 + s.params.horizon;
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulate: step must be > 0");
  const std::size_t keep = std::max<std::size_t>(opt.keep_every, 1);
  const auto& pol = s.policy;
  const bool open_loop = pol.kind == PolicyKind::OpenLoop;

  TrajectoryRecord rec;
  rec.n = s.concrete.n();
  rec.m = s.concrete.m();
  rec.p = s.concrete.p();
  rec.nr = s.abstract.n();
  rec.mr = s.abstract.m();
  rec.step = h;
  rec.horizon = s.params.horizon;
  const std::size_t expected = static_cast<std::size_t>(s.params.horizon / h / static_cast<double>(keep)) + 16;
  const auto reserve_all = [&](std::size_t k) {
    rec.t.reserve(k);
    rec.x.reserve(k * rec.n);
    rec.xhat.reserve(k * rec.nr);
    rec.uhat.reserve(k * rec.mr);
    rec.uhatdot.reserve(k * rec.mr);
    rec.u.reserve(k * rec.m);
    rec.y.reserve(k * rec.p);
    rec.yhat.reserve(k * rec.p);
    rec.vg.reserve(k);
    rec.err.reserve(k);
  };
  reserve_all(expected);

  JointSystem sys(s, g);
  Rk4 rk4(sys);
  Sampler sampler(s, g, sys);

  Vector z = initial_state(s, g);
  z.insert(z.end(), s.params.xhat0.begin(), s.params.xhat0.end());
  std::size_t piece = initial_piece(pol, s.params.xhat0);

  const auto& first = sampler.eval(t0, z, piece);
  const double vg0 = first.vg;
  rec.initial_in_relation = vg0 <= s.params.epsilon;
  double rbar_sup = first.rbar;
  store(rec, t0, z, first);
  if (!(t_end > t0)) {
    rec.rbar_realized = rbar_sup;
    return rec;
  }

  const auto xhat_of = [&](const Vector& zz) { return std::span<const double>(zz.data() + rec.n, rec.nr); };
  const double bisect_tol = 1e-9 * s.params.horizon;
  const double snap = 1e-9 * h;
  double t = t0;
  double anchor = t0;
  std::size_t k = 0;
  double last_jump = -std::numeric_limits<double>::infinity();
  Vector z_next, z_mid;

  while (t < t_end) {
    double target = anchor + static_cast<double>(k + 1) * h;
    if (target >= t_end - snap) target = t_end;
    bool at_boundary = false;
    if (open_loop && piece + 1 < pol.segments.size()) {
      const double b = pol.segments[piece].t_end;
      if (b < t_end && target >= b - snap) {
        target = b;
        at_boundary = true;
      }
    }
    double dt = target - t;
    rk4.step(t, z, dt, piece, z_next);

    bool crossing = false;
    std::size_t crossed_to = piece;
    if (!open_loop) {
      auto where = pol.locate(xhat_of(z_next));
      if (!where || *where != piece) {
        double lo = 0.0, hi = dt;
        for (int it = 0; it < 200 && hi - lo > bisect_tol; ++it) {
          const double mid = 0.5 * (lo + hi);
          rk4.step(t, z, mid, piece, z_mid);
          const auto w = pol.locate(xhat_of(z_mid));
          if (w && *w == piece) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        dt = hi;
        target = t + hi;
        rk4.step(t, z, hi, piece, z_next);
        where = pol.locate(xhat_of(z_next));
        if (!where) {
          throw Error(ErrorCode::DomainGap,
                      "abstract state left every policy region at t = " + std::to_string(target));
        }
        crossing = *where != piece;
        crossed_to = *where;
      }
    }
    if (!all_finite(z_next)) {
      throw Error(ErrorCode::NonFiniteState, "state diverged at t = " + std::to_string(target));
    }
    t = target;
    std::swap(z, z_next);

    if (at_boundary || crossing) {
      const std::size_t next_piece = at_boundary ? piece + 1 : crossed_to;
      const auto& left = sampler.eval(t, z, piece);
      rbar_sup = std::max(rbar_sup, left.rbar);
      const Vector uminus = left.uh;
      const Vector eminus = left.e;
      piece = next_piece;
      anchor = t;
      k = 0;
      const auto& right = sampler.eval(t, z, piece);
      Vector delta(rec.mr);
      for (std::size_t i = 0; i < rec.mr; ++i) delta[i] = right.uh[i] - uminus[i];
      const double dn = norm2(delta);
      if (dn > 1e-12 * (1.0 + norm2(uminus))) {
        if (t - last_jump < 10.0 * h) {
          throw Error(ErrorCode::ZenoJumps, "abstract input jumps closer than 10 h apart near t = " +
                                                std::to_string(t));
        }
        last_jump = t;
        JumpRecord jr;
        jr.event = JumpEvent{t, delta, at_boundary ? JumpCause::SegmentBoundary : JumpCause::RegionCrossing};
        jr.uhat_minus = uminus;
        jr.uhat_plus = right.uh;
        jr.error_minus = eminus;
        jr.error_plus = right.e;
        jr.rbar_used = rbar_sup;
        jr.budget = refine::jump_admissible(delta, t - t0, vg0, g, s.params.epsilon, rbar_sup);
        jr.sample_index = rec.samples();
        rec.jumps.push_back(std::move(jr));
      }
      rbar_sup = std::max(rbar_sup, right.rbar);
      store(rec, t, z, right);
      continue;
    }

    ++k;
    const auto& v = sampler.eval(t, z, piece);
    rbar_sup = std::max(rbar_sup, v.rbar);
    if (k % keep == 0 || t >= t_end) store(rec, t, z, v);
  }
  rec.rbar_realized = rbar_sup;
  return rec;
}

const CheckSummary* VerificationReport::find(const std::string& name) const noexcept {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

VerificationReport verify_trajectory(const TrajectoryRecord& rec, const RefinementGains& g,
                                     double epsilon, const OperatingEnvelope& env,
                                     double input_ball_radius, double rbar_max, double slack) {
  VerificationReport rep;
  rep.slack = slack;
  rep.rbar_max = rbar_max;
  const std::size_t ns = rec.samples();

  auto make = [](std::string name, double bound) {
    CheckSummary c;
    c.name = std::move(name);
    c.bound = bound;
    return c;
  };
  auto note = [](CheckSummary& c, double value, double t, bool violated) {
    c.worst = std::max(c.worst, value);
    if (violated) {
      if (c.violations == 0) c.first_violation_time = t;
      ++c.violations;
    }
  };
  const auto rel = [](double bound) { return bound * (1.0 + 1e-9) + 1e-12; };

  CheckSummary c_err = make("output_error", epsilon + slack);
  CheckSummary c_vg = make("vg", epsilon + slack);
  CheckSummary c_u = make("input_ball", input_ball_radius);
  CheckSummary c_xh = make("xhat_envelope", env.xhat_max);
  CheckSummary c_uh = make("uhat_envelope", env.uhat_max);
  CheckSummary c_uhd = make("uhatdot_envelope", env.uhatdot_max);
  // Signed margins (value - bound); stay -inf when nothing was checked.
  CheckSummary c_decay = make("decay_bound", 0.0);
  CheckSummary c_jump = make("jump_budget", 0.0);
  c_decay.worst = c_jump.worst = -std::numeric_limits<double>::infinity();
  CheckSummary c_init = make("initial_relation", epsilon);

  if (ns > 0) {
    rep.initial_in_relation = rec.vg[0] <= epsilon;
    note(c_init, rec.vg[0], rec.t[0], !rep.initial_in_relation);
  }

  // Jump samples restart the decay comparison from the post-jump value.
  std::vector<std::size_t> restarts;
  for (const auto& j : rec.jumps) restarts.push_back(j.sample_index);
  std::size_t next_restart = 0;
  std::size_t interval_start = 0;
  const double limit = 2.0 * rbar_max / g.a1;

  for (std::size_t i = 0; i < ns; ++i) {
    const double t = rec.t[i];
    note(c_err, rec.err[i], t, rec.err[i] > epsilon + slack);
    note(c_vg, rec.vg[i], t, rec.vg[i] > epsilon + slack);
    const double un = norm2(rec.u_at(i));
    note(c_u, un, t, un > input_ball_radius * (1.0 + 1e-12));
    const double xn = norm2(rec.xhat_at(i));
    note(c_xh, xn, t, xn > rel(env.xhat_max));
    const double uhn = norm2(rec.uhat_at(i));
    note(c_uh, uhn, t, uhn > rel(env.uhat_max));
    const double udn = norm2(rec.uhatdot_at(i));
    note(c_uhd, udn, t, udn > rel(env.uhatdot_max));

    while (next_restart < restarts.size() && restarts[next_restart] <= i) {
      interval_start = restarts[next_restart];
      ++next_restart;
    }
    const double decay = std::exp(-0.5 * g.a1 * (t - rec.t[interval_start]));
    const double bound = decay * rec.vg[interval_start] + (1.0 - decay) * limit + slack;
    note(c_decay, rec.vg[i] - bound, t, rec.vg[i] > bound);
  }
  rep.decay_violations = c_decay.violations;

  std::size_t sample_cursor = 0;
  double sample_rbar = 0.0;
  for (const auto& j : rec.jumps) {
    ++rep.jump_count;
    const double vg0 = ns > 0 ? rec.vg[0] : 0.0;
    const auto budget = refine::jump_admissible(j.event.delta, j.event.time - (ns > 0 ? rec.t[0] : 0.0),
                                                vg0, g, epsilon, j.rbar_used);
    // The logged rbar must dominate every stored sample before the jump.
    for (; sample_cursor < j.sample_index && sample_cursor < ns; ++sample_cursor) {
      sample_rbar = std::max(sample_rbar, g.rbar1 * norm2(rec.xhat_at(sample_cursor)) +
                                              g.rbar2 * norm2(rec.uhat_at(sample_cursor)) +
                                              g.rbar3 * norm2(rec.uhatdot_at(sample_cursor)));
    }
    const bool consistent = j.rbar_used >= sample_rbar * (1.0 - 1e-12) - 1e-15;
    const bool ok = budget.pass && consistent;
    if (ok) ++rep.jumps_passed;
    note(c_jump, budget.lhs - budget.rhs, j.event.time, !ok);
  }

  rep.max_output_error = c_err.worst;
  rep.max_vg = c_vg.worst;
  rep.max_u = c_u.worst;
  rep.max_xhat = c_xh.worst;
  rep.max_uhat = c_uh.worst;
  rep.max_uhatdot = c_uhd.worst;
  rep.checks = {c_init, c_err, c_vg, c_u, c_xh, c_uh, c_uhd, c_decay, c_jump};
  rep.passed = std::all_of(rep.checks.begin(), rep.checks.end(),
                           [](const CheckSummary& c) { return c.violations == 0; });
  return rep;
}

double calibrate_decay_slack(const Scenario& s, const RefinementGains& g,
                             const TrajectoryRecord& coarse) {
  Scenario fine = s;
  fine.params.step = 0.5 * s.params.step;
  const TrajectoryRecord f = simulate(fine, g, SimulationOptions{2});

  const double tol = 1e-9 * s.params.step;
  double diff = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < coarse.samples(); ++i) {
    const double t = coarse.t[i];
    while (j < f.samples() && f.t[j] < t - tol) ++j;
    if (j < f.samples() && std::abs(f.t[j] - t) <= tol) {
      diff = std::max(diff, std::abs(coarse.vg[i] - f.vg[j]));
    }
  }
  double scale = 0.0;
  for (double v : coarse.x) scale = std::max(scale, std::abs(v));
  for (double v : coarse.xhat) scale = std::max(scale, std::abs(v));
  const double floor = 1e-12 * (1.0 + scale) * (1.0 + numerics::spectral_norm(g.M_sqrt));
  return std::max(2.0 * (16.0 / 15.0) * diff, floor);
}

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  out << buf;
}

void put_all(std::ostream& out, std::span<const double> v) {
  for (double x : v) {
    out << ',';
    put(out, x);
  }
}

void header(std::ostream& out, const char* name, std::size_t n) {
  for (std::size_t i = 1; i <= n; ++i) out << ',' << name << i;
}

}  // namespace

void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& out, std::size_t stride) {
  stride = std::max<std::size_t>(stride, 1);
  out << 't';
  header(out, "x", rec.n);
  header(out, "xhat", rec.nr);
  header(out, "uhat", rec.mr);
  header(out, "uhatdot", rec.mr);
  header(out, "u", rec.m);
  header(out, "y", rec.p);
  header(out, "yhat", rec.p);
  out << ",vg,err\n";
  std::size_t next_jump = 0;
  const std::size_t ns = rec.samples();
  for (std::size_t i = 0; i < ns; ++i) {
    bool is_jump = false;
    while (next_jump < rec.jumps.size() && rec.jumps[next_jump].sample_index < i) ++next_jump;
    if (next_jump < rec.jumps.size() && rec.jumps[next_jump].sample_index == i) is_jump = true;
    if (i % stride != 0 && i + 1 != ns && !is_jump) continue;
    put(out, rec.t[i]);
    put_all(out, rec.x_at(i));
    put_all(out, rec.xhat_at(i));
    put_all(out, rec.uhat_at(i));
    put_all(out, rec.uhatdot_at(i));
    put_all(out, rec.u_at(i));
    put_all(out, rec.y_at(i));
    put_all(out, rec.yhat_at(i));
    out << ',';
    put(out, rec.vg[i]);
    out << ',';
    put(out, rec.err[i]);
    out << '\n';
  }
}

void write_jumps_csv(const TrajectoryRecord& rec, std::ostream& out) {
  out << "tau";
  header(out, "delta", rec.mr);
  out << ",lhs,rhs,pass\n";
  for (const auto& j : rec.jumps) {
    put(out, j.event.time);
    put_all(out, j.event.delta);
    out << ',';
    put(out, j.budget.lhs);
    out << ',';
    put(out, j.budget.rhs);
    out << ',' << (j.budget.pass ? 1 : 0) << '\n';
  }
}

}  // namespace gaas::sim
