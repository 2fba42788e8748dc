#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "curvarb/geometry.hpp"
#include "curvarb/grid.hpp"
#include "curvarb/mcf2d.hpp"
#include "curvarb/portfolio.hpp"

namespace curvarb::sde {

using Vec2 = Eigen::Vector2d;

struct SimConfig {
    double dt = 1e-4;
    long n_paths = 1;
    std::uint64_t seed = 0;
    int brownian_dim = 1;     // 1 for the skew drive, d-1 for boundary continuation
    double t_max = 0.0;       // censoring horizon; 0 = 2 * (field max)
    long record_stride = 1;   // 0: endpoints only
    bool track_levels = false;  // record max |w(X) - (w0 - t)| along the path
    int threads = 1;
};

struct PlanarPath {
    std::vector<double> times;
    std::vector<Vec2> points;
    std::vector<double> realized_trace;  // running sum of |dX|^2 at recorded nodes
    double exit_time = -1.0;
    Vec2 exit_point = Vec2::Zero();
    bool censored = false;
    double final_time = 0.0;
    double final_trace = 0.0;
    double max_level_deviation = 0.0;
};

// Arrival-type field driving the skew-gradient diffusion.
class WField {
public:
    virtual ~WField() = default;
    virtual double value(const Vec2& x) const = 0;
    virtual Vec2 gradient(const Vec2& x) const = 0;
    virtual double switch_threshold() const = 0;  // g_min
    virtual double max_value() const = 0;
};

// w(x) = 1 - |x|^2 on the unit disk.
std::shared_ptr<WField> analytic_disk_field();

// Grid-backed field: central-difference gradients, bilinear interpolation,
// g_min = max(10 h |hess|-estimate, 1e-4) with a median-based estimate.
std::shared_ptr<WField> grid_field(const Grid2& grid);

// Unnormalized rotation direction (x2, -x1); its dot product with x vanishes
// exactly in floating point.
inline Vec2 circle_direction(const Vec2& x) { return Vec2(x.y(), -x.x()); }

// dX = (X2, -X1)/|X| dW with the degenerate start moving along (1, 0).
PlanarPath simulate_circle(const Vec2& x0, const mcf2d::Domain2D& domain, const SimConfig& cfg,
                           long path_index = 0);

// dX = skew-grad w / |grad w| dW while the gradient is meaningful; scaled
// Brownian steps (1/sqrt(2) per component) where it is not.  Throws
// std::domain_error when x0 is not strictly inside the domain.
PlanarPath simulate_skew_gradient(const Vec2& x0, const WField& field,
                                  const mcf2d::Domain2D& domain, const SimConfig& cfg,
                                  long path_index = 0);

// Market-generating path: skew-gradient until the exit from K, then a
// reflected unit-trace motion along the exit edge up to t_end, so the lifted
// market keeps its trace clock on the whole horizon.
PlanarPath simulate_market_plane(const Vec2& x0, const WField& field,
                                 const geometry::PolytopeK& K, const SimConfig& cfg, double t_end,
                                 long path_index = 0);

// mu(t) = lift(X(t)); quadratic covariation rebuilt from the increments.
portfolio::SimplexPath to_market_path(const PlanarPath& path, const geometry::IsometryMap& U);

struct ExitStats {
    double essinf_estimate = 0.0;  // 1st percentile
    double ci_lo = 0.0;            // bootstrap 95% CI of the 1st percentile
    double ci_hi = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    long n = 0;
    long n_censored = 0;
    double censor_fraction = 0.0;
    std::vector<long> histogram;
    double hist_lo = 0.0;
    double hist_hi = 0.0;
};

ExitStats exit_time_statistics(const std::vector<double>& taus,
                               const std::vector<std::uint8_t>& censored,
                               int histogram_bins = 30, std::uint64_t bootstrap_seed = 0x0b5e);
ExitStats exit_time_statistics(const std::vector<PlanarPath>& ensemble);

struct EnsembleSummary {
    std::vector<double> taus;
    std::vector<std::uint8_t> censored;
    std::vector<double> final_traces;
    std::vector<double> final_times;
    std::vector<double> level_deviations;
};

EnsembleSummary run_circle_ensemble(const Vec2& x0, const mcf2d::Domain2D& domain,
                                    const SimConfig& cfg);
EnsembleSummary run_skew_ensemble(const Vec2& x0, const WField& field,
                                  const mcf2d::Domain2D& domain, const SimConfig& cfg);

}  // namespace curvarb::sde
