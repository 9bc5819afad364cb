#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vgiq::estimate {

enum class Method { efficiency, density };

std::string_view to_string(Method m);

struct CountRange {
    double low = 0.0;
    double high = 0.0;
    Method method = Method::efficiency;
};

/// Total count implied by a mapped count and the cumulative matching
/// efficiencies at a larger and a smaller radius:
/// [mapped / eff_hi_radius, mapped / eff_lo_radius].
/// Throws std::domain_error for a zero efficiency and std::invalid_argument
/// unless 0 < eff_lo_radius <= eff_hi_radius <= 1.
CountRange from_efficiency(double mapped, double eff_hi_radius, double eff_lo_radius);

/// [d_lo * area, d_hi * area]. Throws std::invalid_argument unless
/// 0 <= d_lo <= d_hi and area > 0.
CountRange from_density(double d_lo, double d_hi, double area_km2);

struct DistrictInput {
    std::string region_id;
    double mapped = 0.0;
    double eff_hi_radius = 0.0;
    double eff_lo_radius = 0.0;
};

struct DistrictEstimate {
    std::string region_id;
    CountRange range;
};

struct AggregateEstimate {
    std::vector<DistrictEstimate> districts;
    std::vector<std::string> skipped;  // districts without usable efficiency
    CountRange total;
};

/// Per-district extrapolation summed into a total.
AggregateEstimate aggregate_by_district(std::span<const DistrictInput> districts);

/// Rounds to `digits` significant figures (human-readable output only).
double round_significant(double value, int digits = 2);

} // namespace vgiq::estimate
