#include "vgiq/fitting.hpp"

#include "vgiq/geo.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vgiq::fitting {

double logistic(double x, const LogisticParams& p)
{
    const double e = std::exp(-p.steepness * (x - p.midpoint));
    // exp overflow gives inf and the quotient saturates at the baseline
    return p.amplitude / (1.0 + e) + p.baseline;
}

LogisticParams canonicalize(const LogisticParams& p)
{
    if (p.amplitude >= 0.0) {
        return p;
    }
    return {-p.amplitude, -p.steepness, p.midpoint, p.amplitude + p.baseline};
}

std::optional<std::pair<double, double>> rise_interval(const LogisticParams& p)
{
    if (p.steepness == 0.0 || !std::isfinite(p.steepness)) {
        return std::nullopt;
    }
    const double half_width = std::log(9.0) / std::abs(p.steepness);
    return std::pair{p.midpoint - half_width, p.midpoint + half_width};
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

LogisticParams from_vec(const Vec4& v)
{
    return {v[0], v[1], v[2], v[3]};
}

class Problem {
public:
    Problem(std::span<const DataPoint> points, const FitOptions& options)
        : points_(points), options_(options)
    {
        weights_.resize(static_cast<Eigen::Index>(points.size()));
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double w = options.weights ? (*options.weights)[i] : 1.0;
            weights_[static_cast<Eigen::Index>(i)] = std::sqrt(w);
        }
    }

    Eigen::Index size() const { return static_cast<Eigen::Index>(points_.size()); }

    // Weighted residuals y_i - f(x_i) (in transformed space).
    Eigen::VectorXd residuals(const Vec4& v) const
    {
        const auto p = from_vec(v);
        Eigen::VectorXd r(size());
        for (Eigen::Index i = 0; i < size(); ++i) {
            const auto& pt = points_[static_cast<std::size_t>(i)];
            r[i] = weights_[i] * (transform(pt.y) - transform(logistic(pt.x, p)));
        }
        return r;
    }

    double cost(const Eigen::VectorXd& r) const { return r.squaredNorm(); }

    double rmse(const Vec4& v) const
    {
        const auto r = residuals(v);
        return std::sqrt(r.squaredNorm() / weights_.squaredNorm());
    }

    // Forward-difference Jacobian of the residuals.
    Eigen::MatrixXd jacobian(const Vec4& v, const Eigen::VectorXd& r0) const
    {
        Eigen::MatrixXd jac(size(), 4);
        for (int j = 0; j < 4; ++j) {
            Vec4 shifted = v;
            const double h = 1e-6 * std::max(std::abs(v[j]), 1.0);
            shifted[j] += h;
            jac.col(j) = (residuals(shifted) - r0) / h;
        }
        return jac;
    }

private:
    double transform(double y) const
    {
        return options_.log_space ? std::log(y + options_.log_offset) : y;
    }

    std::span<const DataPoint> points_;
    const FitOptions& options_;
    Eigen::VectorXd weights_;
};

void check_input(std::span<const DataPoint> points, const FitOptions& options)
{
    if (points.size() < 5) {
        throw std::invalid_argument("fit_logistic: need at least 5 points");
    }
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw std::invalid_argument("fit_logistic: non-finite data");
        }
        if (options.log_space && !(p.y + options.log_offset > 0.0)) {
            throw std::invalid_argument("fit_logistic: log-space fit needs y > -log_offset");
        }
    }
    const auto [xmin, xmax] = std::minmax_element(
        points.begin(), points.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    if (xmin->x == xmax->x) {
        throw std::invalid_argument("fit_logistic: all x values are equal");
    }
    if (options.weights) {
        if (options.weights->size() != points.size()) {
            throw std::invalid_argument("fit_logistic: weight count mismatch");
        }
        for (double w : *options.weights) {
            if (!(w > 0.0) || !std::isfinite(w)) {
                throw std::invalid_argument("fit_logistic: weights must be positive");
            }
        }
    }
}

double median_x(std::span<const DataPoint> points)
{
    std::vector<double> xs;
    xs.reserve(points.size());
    for (const auto& p : points) {
        xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

} // namespace

FitResult fit_logistic(std::span<const DataPoint> points, const FitOptions& options)
{
    check_input(points, options);

    double xmin = points.front().x;
    double xmax = xmin;
    double ymin = points.front().y;
    double ymax = ymin;
    for (const auto& p : points) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }

    Vec4 v{ymax - ymin, 4.0 / (xmax - xmin), median_x(points), ymin};

    FitResult result;
    if (ymax == ymin) {
        result.params = from_vec(v);
        result.degenerate = true;
        result.converged = false;
        result.rmse = 0.0;
        return result;
    }

    const Problem problem(points, options);
    Eigen::VectorXd r = problem.residuals(v);
    double cost = problem.cost(r);
    double lambda = 1e-3;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.n_iter = iter + 1;
        if (cost == 0.0) {
            result.converged = true;
            break;
        }
        const Eigen::MatrixXd jac = problem.jacobian(v, r);
        const Mat4 jtj = jac.transpose() * jac;
        // residuals are y - f, so the descent direction solves (JtJ) d = -Jt r
        const Vec4 grad = jac.transpose() * r;

        bool accepted = false;
        while (!accepted) {
            Mat4 damped = jtj;
            for (int j = 0; j < 4; ++j) {
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
            }
            const Vec4 step = damped.ldlt().solve(-grad);
            const Vec4 candidate = v + step;
            const Eigen::VectorXd r_new = problem.residuals(candidate);
            const double cost_new = problem.cost(r_new);

            if (step.allFinite() && std::isfinite(cost_new) && cost_new < cost) {
                const double rel = (cost - cost_new) / cost;
                v = candidate;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                if (rel < options.relative_tolerance) {
                    result.converged = true;
                }
            } else {
                lambda *= 10.0;
                if (lambda > 1e16) {
                    break;
                }
            }
        }
        if (!accepted) {
            // No downhill step at any damping: a (numerical) minimum.
            result.converged = true;
            break;
        }
        if (result.converged) {
            break;
        }
    }

    result.params = canonicalize(from_vec(v));
    result.rmse = problem.rmse(v);
    return result;
}

DensityTable densities_by_region(std::span<const OsmElement> elements,
                                 std::span<const Region> regions,
                                 std::span<const CrossCategory> cats)
{
    std::vector<GeoPoint> nodes;
    for (const auto& e : elements) {
        if (e.is_node() &&
            std::any_of(cats.begin(), cats.end(), [&](auto c) { return has_category(e, c); })) {
            nodes.push_back({e.lat, e.lon});
        }
    }

    DensityTable table;
    std::vector<const Region*> candidates;
    for (const auto& r : regions) {
        if (!r.census) {
            ++table.excluded_no_census;
            continue;
        }
        candidates.push_back(&r);
    }

    std::vector<std::size_t> counts(candidates.size(), 0);
    for (const auto& p : nodes) {
        bool assigned = false;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (geo::point_in_region(p, *candidates[i])) {
                ++counts[i];
                assigned = true;
            }
        }
        if (!assigned) {
            ++table.unassigned_nodes;
        }
    }

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& r = *candidates[i];
        table.rows.push_back({r.region_id, counts[i],
                              static_cast<double>(counts[i]) / r.area_km2,
                              r.census->catholic_share * 100.0});
    }
    return table;
}

std::vector<DataPoint> to_points(const DensityTable& table)
{
    std::vector<DataPoint> pts;
    pts.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        pts.push_back({row.catholic_share_pct, row.density});
    }
    return pts;
}

} // namespace vgiq::fitting
