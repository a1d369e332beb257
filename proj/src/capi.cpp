#include "gaas/gaas.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "gaas/error.hpp"
#include "gaas/model.hpp"
#include "gaas/scenarios.hpp"
#include "gaas/serialize.hpp"
#include "gaas/sim.hpp"
#include "gaas/synthesis.hpp"

struct gaas_scenario {
  gaas::Scenario value;
};

struct gaas_gains {
  gaas::RefinementGains value;
};

struct gaas_report {
  gaas::ConditionReport value;
  std::string json;
};

struct gaas_trajectory {
  gaas::sim::TrajectoryRecord value;
};

struct gaas_verification {
  gaas::sim::VerificationReport value;
  double initial_vg = 0.0;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

gaas_status map_code(gaas::ErrorCode code) {
  using gaas::ErrorCode;
  switch (code) {
    case ErrorCode::NonFinite: return GAAS_ERR_NON_FINITE;
    case ErrorCode::NonSquare: return GAAS_ERR_NON_SQUARE;
    case ErrorCode::NotSymmetric: return GAAS_ERR_NOT_SYMMETRIC;
    case ErrorCode::DimensionMismatch: return GAAS_ERR_DIMENSION_MISMATCH;
    case ErrorCode::NoConvergence: return GAAS_ERR_NO_CONVERGENCE;
    case ErrorCode::SingularOperator: return GAAS_ERR_SINGULAR_OPERATOR;
    case ErrorCode::NotPSD: return GAAS_ERR_NOT_PSD;
    case ErrorCode::InconsistentConstraints: return GAAS_ERR_INCONSISTENT_CONSTRAINTS;
    case ErrorCode::NotStabilizing: return GAAS_ERR_NOT_STABILIZING;
    case ErrorCode::SchemaError: return GAAS_ERR_SCHEMA;
    case ErrorCode::InvariantViolation: return GAAS_ERR_INVARIANT_VIOLATION;
    case ErrorCode::DomainGap: return GAAS_ERR_DOMAIN_GAP;
    case ErrorCode::NonFiniteState: return GAAS_ERR_NON_FINITE_STATE;
    case ErrorCode::ZenoJumps: return GAAS_ERR_ZENO_JUMPS;
    case ErrorCode::Io: return GAAS_ERR_IO;
    case ErrorCode::InvalidArgument: return GAAS_ERR_INVALID_ARGUMENT;
  }
  return GAAS_ERR_INTERNAL;
}

template <class F>
gaas_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return GAAS_OK;
  } catch (const gaas::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  }
  return GAAS_ERR_INTERNAL;
}

void require(bool cond, const char* what) {
  if (!cond) throw gaas::Error(gaas::ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gaas_status set_param(gaas_scenario* s, double gaas::ScenarioParameters::*field, double v) {
  return guarded([&] {
    require(s != nullptr, "null scenario");
    gaas::Scenario copy = s->value;
    copy.params.*field = v;
    gaas::validate_scenario(copy);
    s->value = std::move(copy);
  });
}

const gaas::Matrix* gains_matrix(const gaas::RefinementGains& g, const std::string& name) {
  if (name == "M") return &g.M;
  if (name == "M_sqrt") return &g.M_sqrt;
  if (name == "K") return &g.K;
  if (name == "P") return &g.P;
  if (name == "Q") return &g.Q;
  if (name == "S") return &g.S;
  if (name == "R") return &g.R;
  return nullptr;
}

void unknown_name(const char* name) {
  throw gaas::Error(gaas::ErrorCode::InvalidArgument, std::string("unknown scalar name: ") + (name ? name : "(null)"));
}

}  // namespace

extern "C" {

const char* gaas_version(void) { return GAAS_VERSION_STRING; }

const char* gaas_status_name(gaas_status status) {
  switch (status) {
    case GAAS_OK: return "Ok";
    case GAAS_ERR_INTERNAL: return "Internal";
    default: break;
  }
  const int v = static_cast<int>(status);
  if (v >= 1 && v <= 16) return gaas::to_string(static_cast<gaas::ErrorCode>(v - 1));
  return "Unknown";
}

const char* gaas_last_error(void) { return g_last_error.c_str(); }

void gaas_string_free(char* s) { std::free(s); }

gaas_status gaas_scenario_from_json(const char* text, gaas_scenario** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new gaas_scenario{gaas::parse_config(text)};
  });
}

gaas_status gaas_scenario_from_file(const char* path, gaas_scenario** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new gaas_scenario{gaas::load_config(path)};
  });
}

gaas_status gaas_scenario_builtin(const char* name, gaas_scenario** out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = new gaas_scenario{gaas::parse_config(gaas::scenarios::builtin_config(name))};
  });
}

gaas_status gaas_scenario_random(uint64_t seed, gaas_scenario** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new gaas_scenario{gaas::scenarios::random_scenario(seed)};
  });
}

gaas_status gaas_scenario_set_epsilon(gaas_scenario* s, double v) {
  return set_param(s, &gaas::ScenarioParameters::epsilon, v);
}
gaas_status gaas_scenario_set_a1(gaas_scenario* s, double v) {
  return set_param(s, &gaas::ScenarioParameters::a1, v);
}
gaas_status gaas_scenario_set_step(gaas_scenario* s, double v) {
  return set_param(s, &gaas::ScenarioParameters::step, v);
}
gaas_status gaas_scenario_set_horizon(gaas_scenario* s, double v) {
  return set_param(s, &gaas::ScenarioParameters::horizon, v);
}

gaas_status gaas_scenario_to_json(const gaas_scenario* s, char** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = dup_string(gaas::emit_config(s->value));
  });
}

void gaas_scenario_free(gaas_scenario* s) { delete s; }

gaas_status gaas_synthesize(const gaas_scenario* s, int force_s_zero, gaas_gains** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = new gaas_gains{gaas::synthesis::synthesize(s->value, force_s_zero != 0)};
  });
}

gaas_status gaas_gains_from_json(const gaas_scenario* s, const char* text, gaas_gains** out) {
  return guarded([&] {
    require(s && text && out, "null argument");
    *out = new gaas_gains{gaas::io::gains_from_json(text, s->value)};
  });
}

gaas_status gaas_gains_to_json(const gaas_gains* g, char** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = dup_string(gaas::io::gains_to_json(g->value));
  });
}

gaas_status gaas_gains_scalar(const gaas_gains* g, const char* name, double* out) {
  return guarded([&] {
    require(g && name && out, "null argument");
    const std::string n = name;
    const auto& v = g->value;
    if (n == "a1") *out = v.a1;
    else if (n == "epsilon") *out = v.epsilon;
    else if (n == "rbar1") *out = v.rbar1;
    else if (n == "rbar2") *out = v.rbar2;
    else if (n == "rbar3") *out = v.rbar3;
    else if (n == "lambda_min_M") *out = v.lambda_min_M;
    else if (n == "input_bound") *out = v.input_bound;
    else unknown_name(name);
  });
}

gaas_status gaas_gains_matrix(const gaas_gains* g, const char* name, double* data, size_t capacity,
                              size_t* rows, size_t* cols) {
  return guarded([&] {
    require(g && name && rows && cols, "null argument");
    const gaas::Matrix* m = gains_matrix(g->value, name);
    if (!m) unknown_name(name);
    *rows = m->rows();
    *cols = m->cols();
    if (data && capacity >= m->size()) std::copy(m->data().begin(), m->data().end(), data);
    else if (data) throw gaas::Error(gaas::ErrorCode::InvalidArgument, "buffer too small");
  });
}

void gaas_gains_free(gaas_gains* g) { delete g; }

gaas_status gaas_check(const gaas_scenario* s, const gaas_gains* g, gaas_report** out) {
  return guarded([&] {
    require(s && g && out, "null argument");
    auto rep = gaas::synthesis::check_assumption(s->value, g->value);
    std::string json = gaas::io::report_to_json(rep, g->value);
    *out = new gaas_report{std::move(rep), std::move(json)};
  });
}

int gaas_report_passed(const gaas_report* r) { return r && r->value.passed() ? 1 : 0; }

gaas_status gaas_report_scalar(const gaas_report* r, const char* name, double* out) {
  return guarded([&] {
    require(r && name && out, "null argument");
    const std::string n = name;
    const auto& v = r->value;
    if (n == "max_feasible_a1") *out = v.max_feasible_a1;
    else if (n == "rbar_max") *out = v.rbar_max;
    else if (n == "feasibility_ratio") *out = v.feasibility_ratio;
    else if (n == "feasibility_margin") *out = v.feasibility_margin;
    else if (n == "input_bound") *out = v.input_bound;
    else if (n == "input_ball_radius") *out = v.input_ball_radius;
    else unknown_name(name);
  });
}

gaas_status gaas_report_record(const gaas_report* r, const char* name, double* value, int* pass) {
  return guarded([&] {
    require(r && name, "null argument");
    const auto* rec = r->value.find(name);
    if (!rec) throw gaas::Error(gaas::ErrorCode::InvalidArgument, std::string("no record named ") + name);
    if (value) *value = rec->value;
    if (pass) *pass = rec->pass ? 1 : 0;
  });
}

gaas_status gaas_report_to_json(const gaas_report* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = dup_string(r->json);
  });
}

void gaas_report_free(gaas_report* r) { delete r; }

gaas_status gaas_simulate(const gaas_scenario* s, const gaas_gains* g, size_t keep_every,
                          gaas_trajectory** out) {
  return guarded([&] {
    require(s && g && out, "null argument");
    *out = new gaas_trajectory{gaas::sim::simulate(s->value, g->value, gaas::sim::SimulationOptions{keep_every})};
  });
}

size_t gaas_trajectory_samples(const gaas_trajectory* t) { return t ? t->value.samples() : 0; }

size_t gaas_trajectory_jump_count(const gaas_trajectory* t) { return t ? t->value.jumps.size() : 0; }

gaas_status gaas_trajectory_final(const gaas_trajectory* t, double* time, double* x, size_t x_capacity,
                                  double* xhat, size_t xhat_capacity) {
  return guarded([&] {
    require(t != nullptr, "null argument");
    const auto& r = t->value;
    require(r.samples() > 0, "empty trajectory");
    const std::size_t last = r.samples() - 1;
    if (time) *time = r.t[last];
    if (x) {
      require(x_capacity >= r.n, "x buffer too small");
      const auto v = r.x_at(last);
      std::copy(v.begin(), v.end(), x);
    }
    if (xhat) {
      require(xhat_capacity >= r.nr, "xhat buffer too small");
      const auto v = r.xhat_at(last);
      std::copy(v.begin(), v.end(), xhat);
    }
  });
}

gaas_status gaas_trajectory_write_csv(const gaas_trajectory* t, const char* path, size_t stride) {
  return guarded([&] {
    require(t && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gaas::Error(gaas::ErrorCode::Io, std::string("cannot write ") + path);
    gaas::sim::write_trajectory_csv(t->value, out, stride);
    if (!out) throw gaas::Error(gaas::ErrorCode::Io, std::string("write failed: ") + path);
  });
}

gaas_status gaas_trajectory_write_jumps_csv(const gaas_trajectory* t, const char* path) {
  return guarded([&] {
    require(t && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gaas::Error(gaas::ErrorCode::Io, std::string("cannot write ") + path);
    gaas::sim::write_jumps_csv(t->value, out);
    if (!out) throw gaas::Error(gaas::ErrorCode::Io, std::string("write failed: ") + path);
  });
}

void gaas_trajectory_free(gaas_trajectory* t) { delete t; }

gaas_status gaas_verify(const gaas_scenario* s, const gaas_gains* g, const gaas_trajectory* t,
                        int calibrate, double slack, gaas_verification** out) {
  return guarded([&] {
    require(s && g && t && out, "null argument");
    const auto& sc = s->value;
    const auto& gv = g->value;
    const auto feas = gaas::synthesis::feasibility(gv.rbar1, gv.rbar2, gv.rbar3, sc.envelope, gv.a1,
                                                   sc.params.epsilon);
    const double kappa = calibrate ? gaas::sim::calibrate_decay_slack(sc, gv, t->value) : slack;
    auto rep = gaas::sim::verify_trajectory(t->value, gv, sc.params.epsilon, sc.envelope,
                                            sc.concrete.input_ball_radius, feas.rbar_max, kappa);
    std::string json = gaas::io::verification_to_json(rep, t->value);
    const double vg0 = t->value.samples() > 0 ? t->value.vg[0] : 0.0;
    *out = new gaas_verification{std::move(rep), vg0, std::move(json)};
  });
}

int gaas_verification_passed(const gaas_verification* v) { return v && v->value.passed ? 1 : 0; }

gaas_status gaas_verification_scalar(const gaas_verification* v, const char* name, double* out) {
  return guarded([&] {
    require(v && name && out, "null argument");
    const std::string n = name;
    const auto& r = v->value;
    if (n == "max_err") *out = r.max_output_error;
    else if (n == "max_vg") *out = r.max_vg;
    else if (n == "max_u") *out = r.max_u;
    else if (n == "jump_count") *out = static_cast<double>(r.jump_count);
    else if (n == "jumps_passed") *out = static_cast<double>(r.jumps_passed);
    else if (n == "decay_violations") *out = static_cast<double>(r.decay_violations);
    else if (n == "slack") *out = r.slack;
    else if (n == "rbar_max") *out = r.rbar_max;
    else if (n == "initial_vg") *out = v->initial_vg;
    else unknown_name(name);
  });
}

gaas_status gaas_verification_to_json(const gaas_verification* v, char** out) {
  return guarded([&] {
    require(v && out, "null argument");
    *out = dup_string(v->json);
  });
}

void gaas_verification_free(gaas_verification* v) { delete v; }

}  // extern "C"
