#include "vgiq/estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace vgiq::estimate {

std::string_view to_string(Method m)
{
    return m == Method::efficiency ? "efficiency" : "density";
}

CountRange from_efficiency(double mapped, double eff_hi_radius, double eff_lo_radius)
{
    if (!std::isfinite(mapped) || mapped < 0.0) {
        throw std::invalid_argument("from_efficiency: mapped count must be non-negative");
    }
    if (eff_lo_radius == 0.0 || eff_hi_radius == 0.0) {
        throw std::domain_error("cannot extrapolate from zero matches");
    }
    if (!(eff_lo_radius > 0.0) || !(eff_lo_radius <= eff_hi_radius) || !(eff_hi_radius <= 1.0)) {
        throw std::invalid_argument(
            "from_efficiency: need 0 < efficiency(small radius) <= efficiency(large radius) <= 1");
    }
    return {mapped / eff_hi_radius, mapped / eff_lo_radius, Method::efficiency};
}

CountRange from_density(double d_lo, double d_hi, double area_km2)
{
    if (!(d_lo >= 0.0) || !(d_lo <= d_hi) || !std::isfinite(d_hi)) {
        throw std::invalid_argument("from_density: need 0 <= d_lo <= d_hi");
    }
    if (!(area_km2 > 0.0) || !std::isfinite(area_km2)) {
        throw std::invalid_argument("from_density: area must be positive");
    }
    return {d_lo * area_km2, d_hi * area_km2, Method::density};
}

AggregateEstimate aggregate_by_district(std::span<const DistrictInput> districts)
{
    AggregateEstimate out;
    out.total.method = Method::efficiency;
    for (const auto& d : districts) {
        try {
            const auto range = from_efficiency(d.mapped, d.eff_hi_radius, d.eff_lo_radius);
            out.total.low += range.low;
            out.total.high += range.high;
            out.districts.push_back({d.region_id, range});
        } catch (const std::logic_error&) {
            out.skipped.push_back(d.region_id);
        }
    }
    return out;
}

double round_significant(double value, int digits)
{
    if (value == 0.0 || !std::isfinite(value)) {
        return value;
    }
    const double magnitude = std::floor(std::log10(std::abs(value)));
    const double scale = std::pow(10.0, static_cast<double>(digits - 1) - magnitude);
    return std::round(value * scale) / scale;
}

} // namespace vgiq::estimate
