#include "gaas/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaas/error.hpp"

namespace gaas {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, "SchemaError at " + path + ": " + msg);
}

[[noreturn]] void dimension_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch at " + path + ": " + msg);
}

[[noreturn]] void invariant_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::InvariantViolation, "InvariantViolation at " + path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    const std::string& path) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      schema_error(join(path, key), "unknown key");
    }
  }
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) schema_error(join(path, key), "missing required field");
  return *it;
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(path, "number is not finite");
  return v;
}

Vector get_vector(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  Vector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return v;
}

Matrix get_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) schema_error(path, "expected a non-empty array of rows");
  std::vector<double> entries;
  std::size_t cols = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    Vector row = get_vector(j[i], rp);
    if (row.empty()) schema_error(rp, "empty matrix row");
    if (i == 0) cols = row.size();
    if (row.size() != cols) dimension_error(rp, "ragged matrix row");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Matrix(j.size(), cols, std::move(entries));
}

Box get_box(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, {"lo", "hi"}, path);
  Box b{get_vector(require(j, "lo", path), join(path, "lo")),
        get_vector(require(j, "hi", path), join(path, "hi"))};
  return b;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

json box_json(const Box& b) { return json{{"lo", b.lo}, {"hi", b.hi}}; }

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& path) {
  if (m.rows() != rows || m.cols() != cols) {
    dimension_error(path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                              ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void check_box(const Box& b, std::size_t dim, const std::string& path) {
  if (b.lo.size() != dim || b.hi.size() != dim) {
    dimension_error(path, "box dimension must be " + std::to_string(dim));
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (b.lo[i] > b.hi[i]) invariant_error(path, "lo > hi on axis " + std::to_string(i));
  }
}

bool interiors_intersect(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (std::max(a.lo[i], b.lo[i]) >= std::min(a.hi[i], b.hi[i])) return false;
  }
  return true;
}

// Exact coverage test for a union of boxes over their bounding hull: every
// cell of the grid induced by all box faces must have its midpoint covered.
bool covers_hull(const AbstractInputPolicy& policy, std::size_t dim) {
  std::vector<Vector> mids(dim);
  std::size_t cells = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    Vector cuts;
    for (const auto& r : policy.regions) {
      cuts.push_back(r.box.lo[d]);
      cuts.push_back(r.box.hi[d]);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() == 1) {
      mids[d].push_back(cuts[0]);
    } else {
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) mids[d].push_back(0.5 * (cuts[k] + cuts[k + 1]));
    }
    cells *= mids[d].size();
    if (cells > 1000000) return true;  // too fine to enumerate; runtime DomainGap still guards
  }
  std::vector<std::size_t> idx(dim, 0);
  Vector p(dim);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rem = c;
    for (std::size_t d = 0; d < dim; ++d) {
      p[d] = mids[d][rem % mids[d].size()];
      rem /= mids[d].size();
    }
    if (!policy.locate(p)) return false;
  }
  return true;
}

void validate_policy(const Scenario& s) {
  const auto& pol = s.policy;
  const std::size_t nr = s.abstract.n();
  const std::size_t mr = s.abstract.m();
  const double horizon = s.params.horizon;
  if (pol.kind == PolicyKind::OpenLoop) {
    if (!pol.regions.empty()) invariant_error("policy.regions", "not allowed for open_loop");
    if (pol.segments.empty()) {
      if (horizon > 0.0) invariant_error("policy.segments", "coverage gap: no segments for a nonzero horizon");
      return;
    }
    for (std::size_t i = 0; i < pol.segments.size(); ++i) {
      const auto& seg = pol.segments[i];
      const std::string path = "policy.segments[" + std::to_string(i) + "]";
      if (!(seg.t_start < seg.t_end)) invariant_error(path, "t_start must be < t_end");
      if (seg.coeffs.size() != mr) {
        dimension_error(join(path, "coeffs"), "expected " + std::to_string(mr) + " channels");
      }
      for (std::size_t c = 0; c < seg.coeffs.size(); ++c) {
        if (seg.coeffs[c].empty() || seg.coeffs[c].size() > 4) {
          invariant_error(join(path, "coeffs") + "[" + std::to_string(c) + "]",
                          "polynomial must have 1 to 4 coefficients");
        }
      }
      if (i > 0 && seg.t_start != pol.segments[i - 1].t_end) {
        invariant_error(path, "segments must be contiguous (t_start == previous t_end)");
      }
    }
    if (pol.segments.front().t_start > 0.0) invariant_error("policy.segments", "coverage gap at t = 0");
    if (pol.segments.back().t_end < horizon) invariant_error("policy.segments", "coverage gap before the horizon");
    return;
  }

  if (!pol.segments.empty()) invariant_error("policy.segments", "not allowed for switched_feedback");
  if (pol.regions.empty()) invariant_error("policy.regions", "at least one region is required");
  for (std::size_t i = 0; i < pol.regions.size(); ++i) {
    const auto& r = pol.regions[i];
    const std::string path = "policy.regions[" + std::to_string(i) + "]";
    check_box(r.box, nr, path);
    check_shape(r.gain, mr, nr, join(path, "gain"));
    for (std::size_t j = 0; j < i; ++j) {
      if (interiors_intersect(r.box, pol.regions[j].box)) {
        invariant_error(path, "interior overlaps region " + std::to_string(j));
      }
    }
  }
  if (!covers_hull(pol, nr)) invariant_error("policy.regions", "regions leave a gap inside their hull");
  if (!pol.locate(s.params.xhat0)) invariant_error("scenario.xhat0", "not inside any policy region");
}

}  // namespace

bool Box::contains(std::span<const double> p, double tol) const {
  if (p.size() != lo.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
  }
  return true;
}

Vector Box::center() const {
  Vector c(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

std::vector<Vector> Box::corners() const {
  const std::size_t d = lo.size();
  std::vector<Vector> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Vector c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = (mask >> i) & 1U ? hi[i] : lo[i];
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<std::size_t> AbstractInputPolicy::locate(std::span<const double> xhat) const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].box.contains(xhat)) return i;
  }
  return std::nullopt;
}

std::size_t AbstractInputPolicy::segment_at(double t) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].t_start <= t) k = i;
  }
  return k;
}

const char* to_string(JumpCause cause) noexcept {
  return cause == JumpCause::SegmentBoundary ? "segment_boundary" : "region_crossing";
}

void validate_scenario(const Scenario& s) {
  const auto& c = s.concrete;
  const auto& a = s.abstract;
  if (c.A.rows() == 0 || !c.A.is_square()) dimension_error("concrete.A", "must be square and non-empty");
  const std::size_t n = c.n();
  if (c.B.rows() != n) dimension_error("concrete.B", "expected " + std::to_string(n) + " rows, got " + std::to_string(c.B.rows()));
  if (c.C.cols() != n) dimension_error("concrete.C", "expected " + std::to_string(n) + " columns, got " + std::to_string(c.C.cols()));
  if (!(c.input_ball_radius > 0.0)) invariant_error("concrete.input_ball_radius", "must be > 0");
  check_box(c.x0_box, n, "concrete.x0_box");

  if (a.A.rows() == 0 || !a.A.is_square()) dimension_error("abstract.A", "must be square and non-empty");
  const std::size_t nr = a.n();
  if (a.B.rows() != nr) dimension_error("abstract.B", "expected " + std::to_string(nr) + " rows, got " + std::to_string(a.B.rows()));
  if (a.C.cols() != nr) dimension_error("abstract.C", "expected " + std::to_string(nr) + " columns, got " + std::to_string(a.C.cols()));
  if (a.C.rows() != c.p()) dimension_error("abstract.C", "output dimension must match concrete.C rows (" + std::to_string(c.p()) + ")");
  if (nr > n) invariant_error("abstract.A", "abstract state dimension exceeds concrete (n_r > n)");
  if (a.m() > c.m()) invariant_error("abstract.B", "abstract input dimension exceeds concrete (m_r > m)");
  check_box(a.x0_box, nr, "abstract.x0_box");

  const auto& e = s.envelope;
  if (e.xhat_max < 0.0) invariant_error("envelope.xhat_max", "must be >= 0");
  if (e.uhat_max < 0.0) invariant_error("envelope.uhat_max", "must be >= 0");
  if (e.uhatdot_max < 0.0) invariant_error("envelope.uhatdot_max", "must be >= 0");

  const auto& p = s.params;
  if (!(p.epsilon > 0.0)) invariant_error("scenario.epsilon", "must be > 0");
  if (!(p.a1 > 0.0)) invariant_error("scenario.a1", "must be > 0");
  check_shape(p.K, c.m(), n, "scenario.K");
  if (p.M) check_shape(*p.M, n, n, "scenario.M");
  if (p.horizon < 0.0) invariant_error("scenario.horizon", "must be >= 0");
  if (!(p.step > 0.0)) invariant_error("scenario.step", "must be > 0");
  if (p.x0 && p.x0->size() != n) dimension_error("scenario.x0", "expected " + std::to_string(n) + " entries");
  if (p.xhat0.size() != nr) dimension_error("scenario.xhat0", "expected " + std::to_string(nr) + " entries");

  validate_policy(s);
}

Scenario parse_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    schema_error("document", std::string("malformed JSON: ") + e.what());
  }
  expect_object(doc, "document");
  reject_unknown(doc, {"concrete", "abstract", "envelope", "policy", "scenario"}, "");

  Scenario s;
  {
    const json& j = require(doc, "concrete", "");
    expect_object(j, "concrete");
    reject_unknown(j, {"A", "B", "C", "input_ball_radius", "x0_box"}, "concrete");
    s.concrete.A = get_matrix(require(j, "A", "concrete"), "concrete.A");
    s.concrete.B = get_matrix(require(j, "B", "concrete"), "concrete.B");
    s.concrete.C = get_matrix(require(j, "C", "concrete"), "concrete.C");
    s.concrete.input_ball_radius =
        get_number(require(j, "input_ball_radius", "concrete"), "concrete.input_ball_radius");
    s.concrete.x0_box = get_box(require(j, "x0_box", "concrete"), "concrete.x0_box");
  }
  {
    const json& j = require(doc, "abstract", "");
    expect_object(j, "abstract");
    reject_unknown(j, {"A", "B", "C", "x0_box"}, "abstract");
    s.abstract.A = get_matrix(require(j, "A", "abstract"), "abstract.A");
    s.abstract.B = get_matrix(require(j, "B", "abstract"), "abstract.B");
    s.abstract.C = get_matrix(require(j, "C", "abstract"), "abstract.C");
    s.abstract.x0_box = get_box(require(j, "x0_box", "abstract"), "abstract.x0_box");
  }
  {
    const json& j = require(doc, "envelope", "");
    expect_object(j, "envelope");
    reject_unknown(j, {"xhat_max", "uhat_max", "uhatdot_max"}, "envelope");
    s.envelope.xhat_max = get_number(require(j, "xhat_max", "envelope"), "envelope.xhat_max");
    s.envelope.uhat_max = get_number(require(j, "uhat_max", "envelope"), "envelope.uhat_max");
    s.envelope.uhatdot_max = get_number(require(j, "uhatdot_max", "envelope"), "envelope.uhatdot_max");
  }
  {
    const json& j = require(doc, "scenario", "");
    expect_object(j, "scenario");
    reject_unknown(j, {"epsilon", "a1", "K", "M", "horizon", "step", "x0", "xhat0"}, "scenario");
    auto& p = s.params;
    if (j.contains("epsilon")) p.epsilon = get_number(j["epsilon"], "scenario.epsilon");
    p.a1 = get_number(require(j, "a1", "scenario"), "scenario.a1");
    p.K = get_matrix(require(j, "K", "scenario"), "scenario.K");
    if (j.contains("M")) p.M = get_matrix(j["M"], "scenario.M");
    p.horizon = get_number(require(j, "horizon", "scenario"), "scenario.horizon");
    if (j.contains("step")) p.step = get_number(j["step"], "scenario.step");
    if (j.contains("x0")) p.x0 = get_vector(j["x0"], "scenario.x0");
    p.xhat0 = j.contains("xhat0") ? get_vector(j["xhat0"], "scenario.xhat0") : s.abstract.x0_box.center();
  }
  {
    const json& j = require(doc, "policy", "");
    expect_object(j, "policy");
    const json& kind = require(j, "kind", "policy");
    if (!kind.is_string()) schema_error("policy.kind", "expected a string");
    const std::string k = kind.get<std::string>();
    if (k == "open_loop") {
      reject_unknown(j, {"kind", "segments"}, "policy");
      s.policy.kind = PolicyKind::OpenLoop;
      const json& segs = require(j, "segments", "policy");
      if (!segs.is_array()) schema_error("policy.segments", "expected an array");
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string path = "policy.segments[" + std::to_string(i) + "]";
        const json& sj = segs[i];
        expect_object(sj, path);
        reject_unknown(sj, {"t_start", "t_end", "coeffs"}, path);
        PolySegment seg;
        seg.t_start = get_number(require(sj, "t_start", path), join(path, "t_start"));
        seg.t_end = get_number(require(sj, "t_end", path), join(path, "t_end"));
        const json& cj = require(sj, "coeffs", path);
        if (!cj.is_array()) schema_error(join(path, "coeffs"), "expected an array per channel");
        for (std::size_t c = 0; c < cj.size(); ++c) {
          seg.coeffs.push_back(get_vector(cj[c], join(path, "coeffs") + "[" + std::to_string(c) + "]"));
        }
        s.policy.segments.push_back(std::move(seg));
      }
    } else if (k == "switched_feedback") {
      reject_unknown(j, {"kind", "regions"}, "policy");
      s.policy.kind = PolicyKind::SwitchedFeedback;
      const json& regs = require(j, "regions", "policy");
      if (!regs.is_array()) schema_error("policy.regions", "expected an array");
      for (std::size_t i = 0; i < regs.size(); ++i) {
        const std::string path = "policy.regions[" + std::to_string(i) + "]";
        const json& rj = regs[i];
        expect_object(rj, path);
        reject_unknown(rj, {"lo", "hi", "gain"}, path);
        FeedbackRegion r;
        r.box.lo = get_vector(require(rj, "lo", path), join(path, "lo"));
        r.box.hi = get_vector(require(rj, "hi", path), join(path, "hi"));
        r.gain = get_matrix(require(rj, "gain", path), join(path, "gain"));
        s.policy.regions.push_back(std::move(r));
      }
    } else {
      schema_error("policy.kind", "must be \"open_loop\" or \"switched_feedback\"");
    }
  }

  validate_scenario(s);
  return s;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const Scenario& s, int indent) {
  json doc;
  doc["concrete"] = {{"A", matrix_json(s.concrete.A)},
                     {"B", matrix_json(s.concrete.B)},
                     {"C", matrix_json(s.concrete.C)},
                     {"input_ball_radius", s.concrete.input_ball_radius},
                     {"x0_box", box_json(s.concrete.x0_box)}};
  doc["abstract"] = {{"A", matrix_json(s.abstract.A)},
                     {"B", matrix_json(s.abstract.B)},
                     {"C", matrix_json(s.abstract.C)},
                     {"x0_box", box_json(s.abstract.x0_box)}};
  doc["envelope"] = {{"xhat_max", s.envelope.xhat_max},
                     {"uhat_max", s.envelope.uhat_max},
                     {"uhatdot_max", s.envelope.uhatdot_max}};
  json pol;
  if (s.policy.kind == PolicyKind::OpenLoop) {
    pol["kind"] = "open_loop";
    pol["segments"] = json::array();
    for (const auto& seg : s.policy.segments) {
      pol["segments"].push_back({{"t_start", seg.t_start}, {"t_end", seg.t_end}, {"coeffs", seg.coeffs}});
    }
  } else {
    pol["kind"] = "switched_feedback";
    pol["regions"] = json::array();
    for (const auto& r : s.policy.regions) {
      pol["regions"].push_back({{"lo", r.box.lo}, {"hi", r.box.hi}, {"gain", matrix_json(r.gain)}});
    }
  }
  doc["policy"] = pol;
  json sc = {{"epsilon", s.params.epsilon},
             {"a1", s.params.a1},
             {"K", matrix_json(s.params.K)},
             {"horizon", s.params.horizon},
             {"step", s.params.step},
             {"xhat0", s.params.xhat0}};
  if (s.params.M) sc["M"] = matrix_json(*s.params.M);
  if (s.params.x0) sc["x0"] = *s.params.x0;
  doc["scenario"] = sc;
  return doc.dump(indent);
}

PairValidation validate_pair(const ConcreteLinearSystem& concrete,
                             const AbstractLinearSystem& abstract) {
  PairValidation v;
  v.state_dim_ok = abstract.n() <= concrete.n();
  v.input_dim_ok = abstract.m() <= concrete.m();
  v.output_dim_ok = abstract.C.rows() == concrete.C.rows();
  return v;
}

}  // namespace gaas

namespace gaas {

Vector policy_value(const AbstractInputPolicy& policy, double t, std::span<const double> xhat) {
  if (policy.kind == PolicyKind::OpenLoop) {
    if (policy.segments.empty()) return {};
    const auto& seg = policy.segments[policy.segment_at(t)];
    Vector u(seg.coeffs.size());
    for (std::size_t c = 0; c < seg.coeffs.size(); ++c) {
      double v = 0.0;
      for (std::size_t k = seg.coeffs[c].size(); k-- > 0;) v = v * t + seg.coeffs[c][k];
      u[c] = v;
    }
    return u;
  }
  const auto idx = policy.locate(xhat);
  if (!idx) throw Error(ErrorCode::DomainGap, "abstract state outside every policy region");
  Vector u = policy.regions[*idx].gain * xhat;
  for (double& v : u) v = -v;
  return u;
}

}  // namespace gaas
