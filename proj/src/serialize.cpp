#include "gaas/serialize.hpp"

#include <cmath>
#include <json.hpp>

#include "gaas/error.hpp"

namespace gaas::io {
namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

// JSON has no NaN; absent values are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Matrix read_matrix(const json& doc, const std::string& key) {
  if (!doc.contains(key)) {
    throw Error(ErrorCode::SchemaError, "SchemaError at gains." + key + ": missing required field");
  }
  const json& j = doc.at(key);
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::SchemaError, "SchemaError at gains." + key + ": expected array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  std::vector<double> data;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) {
      throw Error(ErrorCode::SchemaError, "SchemaError at gains." + key + ": ragged or empty rows");
    }
    for (const auto& v : row) {
      if (!v.is_number()) {
        throw Error(ErrorCode::SchemaError, "SchemaError at gains." + key + ": expected number");
      }
      data.push_back(v.get<double>());
    }
  }
  try {
    return Matrix(j.size(), cols, std::move(data));
  } catch (const Error& e) {
    throw Error(e.code(), std::string(to_string(e.code())) + " at gains." + key + ": " + e.what());
  }
}

void expect_shape(const Matrix& m, std::size_t r, std::size_t c, const std::string& key) {
  if (m.rows() != r || m.cols() != c) {
    throw Error(ErrorCode::DimensionMismatch,
                "DimensionMismatch at gains." + key + ": expected " + std::to_string(r) + "x" +
                    std::to_string(c) + ", got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

}  // namespace

std::string gains_to_json(const RefinementGains& g, int indent) {
  json doc;
  doc["M"] = matrix_json(g.M);
  doc["M_sqrt"] = matrix_json(g.M_sqrt);
  doc["K"] = matrix_json(g.K);
  doc["P"] = matrix_json(g.P);
  doc["Q"] = matrix_json(g.Q);
  doc["S"] = matrix_json(g.S);
  doc["R"] = matrix_json(g.R);
  doc["a1"] = g.a1;
  doc["epsilon"] = g.epsilon;
  doc["rbar1"] = g.rbar1;
  doc["rbar2"] = g.rbar2;
  doc["rbar3"] = g.rbar3;
  doc["lambda_min_M"] = g.lambda_min_M;
  doc["input_bound"] = g.input_bound;
  doc["s_forced_zero"] = g.s_forced_zero;
  return doc.dump(indent);
}

RefinementGains gains_from_json(std::string_view document, const Scenario& s) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("SchemaError at gains: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "SchemaError at gains: expected object");
  const std::size_t n = s.concrete.n(), m = s.concrete.m(), nr = s.abstract.n(), mr = s.abstract.m();
  RefinementGains g;
  g.M = read_matrix(doc, "M");
  g.K = read_matrix(doc, "K");
  g.P = read_matrix(doc, "P");
  g.Q = read_matrix(doc, "Q");
  g.S = read_matrix(doc, "S");
  g.R = read_matrix(doc, "R");
  expect_shape(g.M, n, n, "M");
  expect_shape(g.K, m, n, "K");
  expect_shape(g.P, n, nr, "P");
  expect_shape(g.Q, m, nr, "Q");
  expect_shape(g.S, n, mr, "S");
  expect_shape(g.R, m, mr, "R");
  if (doc.contains("s_forced_zero")) {
    if (!doc["s_forced_zero"].is_boolean()) {
      throw Error(ErrorCode::SchemaError, "SchemaError at gains.s_forced_zero: expected boolean");
    }
    g.s_forced_zero = doc["s_forced_zero"].get<bool>();
  }
  synthesis::refresh_derived(g, s);
  return g;
}

std::string report_to_json(const ConditionReport& r, const RefinementGains& g, int indent) {
  json records = json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"name", rec.name},
                       {"value", number(rec.value)},
                       {"tolerance", number(rec.tolerance)},
                       {"pass", rec.pass},
                       {"detail", rec.detail}});
  }
  json doc;
  doc["passed"] = r.passed();
  doc["records"] = std::move(records);
  doc["max_feasible_a1"] = number(r.max_feasible_a1);
  doc["a1"] = g.a1;
  doc["epsilon"] = g.epsilon;
  doc["rbar1"] = g.rbar1;
  doc["rbar2"] = g.rbar2;
  doc["rbar3"] = g.rbar3;
  doc["rbar_max"] = r.rbar_max;
  doc["feasibility_ratio"] = r.feasibility_ratio;
  doc["feasibility_margin"] = r.feasibility_margin;
  doc["input_bound"] = r.input_bound;
  doc["input_ball_radius"] = r.input_ball_radius;
  doc["lambda_min_M"] = g.lambda_min_M;
  doc["s_forced_zero"] = g.s_forced_zero;
  return doc.dump(indent);
}

std::string verification_to_json(const sim::VerificationReport& v, const sim::TrajectoryRecord& rec,
                                 int indent) {
  json checks = json::array();
  for (const auto& c : v.checks) {
    checks.push_back({{"name", c.name},
                      {"worst", number(c.worst)},
                      {"bound", number(c.bound)},
                      {"violations", c.violations},
                      {"first_violation_time", number(c.first_violation_time)}});
  }
  json jumps = json::array();
  for (const auto& j : rec.jumps) {
    jumps.push_back({{"tau", j.event.time},
                     {"cause", to_string(j.event.cause)},
                     {"delta", j.event.delta},
                     {"uhat_minus", j.uhat_minus},
                     {"uhat_plus", j.uhat_plus},
                     {"rbar_used", j.rbar_used},
                     {"omega", j.budget.omega},
                     {"lhs", j.budget.lhs},
                     {"rhs", j.budget.rhs},
                     {"pass", j.budget.pass}});
  }
  json doc;
  doc["passed"] = v.passed;
  doc["max_err"] = v.max_output_error;
  doc["max_vg"] = v.max_vg;
  doc["max_u"] = v.max_u;
  doc["max_xhat"] = v.max_xhat;
  doc["max_uhat"] = v.max_uhat;
  doc["max_uhatdot"] = v.max_uhatdot;
  doc["initial_in_relation"] = v.initial_in_relation;
  doc["initial_vg"] = rec.samples() > 0 ? rec.vg[0] : 0.0;
  doc["jump_count"] = v.jump_count;
  doc["jumps_passed"] = v.jumps_passed;
  doc["decay_violations"] = v.decay_violations;
  doc["decay_slack"] = v.slack;
  doc["rbar_max"] = v.rbar_max;
  doc["rbar_realized"] = rec.rbar_realized;
  doc["samples"] = rec.samples();
  doc["step"] = rec.step;
  doc["horizon"] = rec.horizon;
  if (rec.samples() > 0) {
    const std::size_t last = rec.samples() - 1;
    const auto x = rec.x_at(last);
    const auto xh = rec.xhat_at(last);
    doc["final"] = {{"t", rec.t[last]},
                    {"x", std::vector<double>(x.begin(), x.end())},
                    {"xhat", std::vector<double>(xh.begin(), xh.end())}};
  }
  doc["checks"] = std::move(checks);
  doc["jumps"] = std::move(jumps);
  return doc.dump(indent);
}

}  // namespace gaas::io
