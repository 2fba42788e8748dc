#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "curvarb/geometry.hpp"
#include "curvarb/grid.hpp"

namespace curvarb::mcf2d {

using Vec2 = Eigen::Vector2d;

// Convex planar domain: polygon (from a chart polytope) or disk.
struct Domain2D {
    enum class Kind { Polygon, Disk };
    Kind kind = Kind::Polygon;
    std::vector<Vec2> poly;  // CCW vertices
    double disk_radius = 1.0;

    static Domain2D from_polytope(const geometry::PolytopeK& K);
    static Domain2D disk(double r);

    double signed_distance(const Vec2& x) const;  // > 0 inside
    double area() const;
    void bounding_box(Vec2& lo, Vec2& hi) const;
    // Boundary polyline sampled at n points (for front initialization).
    std::vector<Vec2> boundary_polygon(int n) const;
};

// Closed convex front, positively oriented.
struct FrontPolygon {
    std::vector<Vec2> vertices;
    double time = 0.0;

    double area() const;
    double max_turning_angle() const;
    bool is_convex(double tol = 1e-8) const;
    bool contains(const Vec2& q) const;
    double signed_distance(const Vec2& q) const;  // > 0 inside
};

struct FrontHistory {
    std::vector<FrontPolygon> contours;   // decimated snapshots, first at t = 0
    double extinction_time = 0.0;         // flow clock (unit curvature speed)
    double final_area = 0.0;
    std::vector<double> step_times;       // every accepted step
    std::vector<double> step_areas;
    std::vector<double> step_max_turning;
};

struct FrontOptions {
    int vertices = 512;
    double displacement_cap = 0.25;   // per-step move <= cap * local edge length
    double area_stop_fraction = 1e-6; // stop when area < fraction * initial area
    int max_steps = 2000000;
};

// Unit-speed curvature flow (normal speed = discrete curvature).  The
// arrival-time field of the half-speed flow is twice this flow's clock.
FrontHistory evolve_front(const FrontPolygon& initial, const FrontOptions& opt = {});

// Arrival value at `query`: 2 x (first flow time whose contour no longer
// encloses the point), linearly interpolated between snapshots.  Throws
// std::domain_error for points outside the initial contour.
double arrival_from_front(const FrontHistory& history, const Vec2& query);

// Grid-sampled arrival-time function w on the domain.
struct ArrivalField {
    Grid2 grid;                       // values = w, inside = node-in-domain mask
    Vec2 critical_point = Vec2::Zero();
    double max_value = 0.0;
    double extinction_time = 0.0;     // half-speed flow clock (= w clock)
    std::vector<double> area_times;   // area trace of the level-set evolution
    std::vector<double> areas;
};

struct ArrivalOptions {
    double band_width_cells = 1.5;    // w fixed to 0 within this boundary band
    int reinit_every = 20;
    double dt_factor = 0.3;           // dt = factor * h^2
    int threads = 1;
};

// Level-set evolution of a signed distance function under normal speed
// kappa/2; node arrival recorded at sign change.  Throws
// std::invalid_argument when fewer than 40 nodes span the inradius.
ArrivalField arrival_grid(const Domain2D& domain, double h, const ArrivalOptions& opt = {});

// Diverse-market domain: triangle chart of the d=3 simplex truncated at
// weight 1 - delta, with the closed-form expected maximal arrival value.
std::pair<geometry::PolytopeK, double> diverse_truncation(double delta);

}  // namespace curvarb::mcf2d
