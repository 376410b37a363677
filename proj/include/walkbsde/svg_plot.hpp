#pragma once

#include <string>
#include <utility>
#include <vector>

#include "walkbsde/harness.hpp"

namespace walkbsde {

/// Self-contained log-log SVG: scatter of (n, error), the fitted line when
/// the fit exists, and a reference line of the given slope anchored at the
/// first point. Throws invalid_argument on empty input.
std::string emit_plot(const RateFit& fit, double reference_slope, const std::string& title);

}  // namespace walkbsde
