#pragma once

#include <string>
#include <string_view>

#include "gaas/model.hpp"
#include "gaas/sim.hpp"
#include "gaas/synthesis.hpp"

namespace gaas::io {

/// Gains bundle as JSON: matrices row-major plus every derived scalar.
std::string gains_to_json(const RefinementGains& gains, int indent = 2);

/// Reads M, K, P, Q, S, R (and s_forced_zero) from a gains document, checks
/// their shapes against `scenario`, and recomputes the derived scalars with
/// a1 and epsilon taken from the scenario. Throws SchemaError or
/// DimensionMismatch with the offending path.
RefinementGains gains_from_json(std::string_view document, const Scenario& scenario);

std::string report_to_json(const ConditionReport& report, const RefinementGains& gains,
                           int indent = 2);

std::string verification_to_json(const sim::VerificationReport& report,
                                 const sim::TrajectoryRecord& record, int indent = 2);

}  // namespace gaas::io
