#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gaas/model.hpp"

namespace gaas::scenarios {

/// Names of the embedded configurations: "casestudy_switched" (double
/// integrator tracking a piecewise feedback-driven single integrator) and
/// "casestudy_ramp" (same pair under the open-loop ramp input).
std::vector<std::string> builtin_names();

/// JSON text of an embedded configuration. Throws InvalidArgument.
std::string builtin_config(std::string_view name);

/// Random feasible scenario: m = n concrete inputs with invertible B, a
/// stabilizing K placed by construction, a stable scalar abstraction driven
/// by a continuous two-piece polynomial input, a sound envelope, and epsilon
/// and the input ball sized so that every trajectory-level check is
/// expected to hold. Deterministic in `seed`.
Scenario random_scenario(std::uint64_t seed);

}  // namespace gaas::scenarios
