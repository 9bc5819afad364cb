#pragma once

#include "vgiq/osm_model.hpp"
#include "vgiq/region.hpp"

#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vgiq::fitting {

/// f(x) = amplitude / (1 + exp(-steepness (x - midpoint))) + baseline
struct LogisticParams {
    double amplitude = 0.0;  // km^-2
    double steepness = 0.0;  // per percentage point
    double midpoint = 0.0;   // percentage points
    double baseline = 0.0;   // km^-2
};

double logistic(double x, const LogisticParams& p);

/// Equivalent parameters with amplitude >= 0.
LogisticParams canonicalize(const LogisticParams& p);

/// x-interval over which the curve rises from 10 % to 90 % of the
/// amplitude above the baseline. Empty when steepness is zero.
std::optional<std::pair<double, double>> rise_interval(const LogisticParams& p);

struct DataPoint {
    double x = 0.0;
    double y = 0.0;
};

struct FitOptions {
    std::optional<std::vector<double>> weights;  // one per point, > 0
    bool log_space = false;     // fit log(y + log_offset) instead of y
    double log_offset = 1e-3;
    int max_iterations = 200;
    double relative_tolerance = 1e-10;
};

struct FitResult {
    LogisticParams params;
    double rmse = 0.0;  // of the fitted residuals (log residuals in log space)
    int n_iter = 0;
    bool converged = false;
    bool degenerate = false;  // constant data, amplitude forced to zero
};

/// Levenberg-Marquardt least squares with a forward-difference Jacobian.
/// Throws std::invalid_argument for fewer than 5 points, all-equal x,
/// non-finite values or bad weights.
FitResult fit_logistic(std::span<const DataPoint> points, const FitOptions& options = {});

/// Per-region node density paired with the Catholic share in percent.
struct DensityRow {
    std::string region_id;
    std::size_t count = 0;
    double density = 0.0;  // count / area_km2
    double catholic_share_pct = 0.0;
};

struct DensityTable {
    std::vector<DensityRow> rows;    // region input order
    std::size_t excluded_no_census = 0;
    std::size_t unassigned_nodes = 0;  // nodes in `cats` inside no candidate region
};

/// Counts nodes carrying any of `cats` (each node once per region).
DensityTable densities_by_region(std::span<const OsmElement> elements,
                                 std::span<const Region> regions,
                                 std::span<const CrossCategory> cats);

std::vector<DataPoint> to_points(const DensityTable& table);

} // namespace vgiq::fitting
