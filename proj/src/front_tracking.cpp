#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "curvarb/mcf2d.hpp"

namespace curvarb::mcf2d {

namespace {

constexpr double kPi = std::numbers::pi;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

}  // namespace

Domain2D Domain2D::from_polytope(const geometry::PolytopeK& K) {
    if (K.dim != 2) throw std::invalid_argument("Domain2D: polytope must be 2-dimensional");
    Domain2D dom;
    dom.kind = Kind::Polygon;
    const int n = static_cast<int>(K.vertices.cols());
    dom.poly.reserve(n);
    Vec2 centroid = Vec2::Zero();
    for (int i = 0; i < n; ++i) centroid += Vec2(K.vertices(0, i), K.vertices(1, i));
    centroid /= n;
    std::vector<std::pair<double, Vec2>> byangle;
    byangle.reserve(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 v(K.vertices(0, i), K.vertices(1, i));
        byangle.emplace_back(std::atan2(v.y() - centroid.y(), v.x() - centroid.x()), v);
    }
    std::sort(byangle.begin(), byangle.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [ang, v] : byangle) dom.poly.push_back(v);
    return dom;
}

Domain2D Domain2D::disk(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("Domain2D::disk: radius must be positive");
    Domain2D dom;
    dom.kind = Kind::Disk;
    dom.disk_radius = r;
    return dom;
}

double Domain2D::signed_distance(const Vec2& x) const {
    if (kind == Kind::Disk) return disk_radius - x.norm();
    const std::size_t n = poly.size();
    bool inside = true;
    double mindist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if (cross2(b - a, x - a) < 0.0) inside = false;
        mindist = std::min(mindist, point_segment_distance(x, a, b));
    }
    return inside ? mindist : -mindist;
}

double Domain2D::area() const {
    if (kind == Kind::Disk) return kPi * disk_radius * disk_radius;
    return polygon_area(poly);
}

void Domain2D::bounding_box(Vec2& lo, Vec2& hi) const {
    if (kind == Kind::Disk) {
        lo = Vec2(-disk_radius, -disk_radius);
        hi = Vec2(disk_radius, disk_radius);
        return;
    }
    lo = Vec2(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    hi = -lo;
    for (const Vec2& v : poly) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
}

std::vector<Vec2> Domain2D::boundary_polygon(int n) const {
    std::vector<Vec2> out;
    out.reserve(n);
    if (kind == Kind::Disk) {
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * kPi * i / n;
            out.emplace_back(disk_radius * std::cos(a), disk_radius * std::sin(a));
        }
        return out;
    }
    const std::size_t m = poly.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        cum[i + 1] = cum[i] + (poly[(i + 1) % m] - poly[i]).norm();
    const double per = cum[m];
    std::size_t edge = 0;
    for (int i = 0; i < n; ++i) {
        const double s = per * i / n;
        while (edge + 1 < m && cum[edge + 1] <= s) ++edge;
        const double u = (s - cum[edge]) / (cum[edge + 1] - cum[edge]);
        out.push_back(poly[edge] + u * (poly[(edge + 1) % m] - poly[edge]));
    }
    return out;
}

double FrontPolygon::area() const { return polygon_area(vertices); }

double FrontPolygon::max_turning_angle() const {
    const std::size_t n = vertices.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = vertices[i] - vertices[(i + n - 1) % n];
        const Vec2 e1 = vertices[(i + 1) % n] - vertices[i];
        const double ang = std::atan2(cross2(e0, e1), e0.dot(e1));
        worst = std::max(worst, std::abs(ang));
    }
    return worst;
}

bool FrontPolygon::is_convex(double tol) const {
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = vertices[i] - vertices[(i + n - 1) % n];
        const Vec2 e1 = vertices[(i + 1) % n] - vertices[i];
        if (cross2(e0, e1) < -tol) return false;
    }
    return true;
}

bool FrontPolygon::contains(const Vec2& q) const {
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cross2(vertices[(i + 1) % n] - vertices[i], q - vertices[i]) < 0.0) return false;
    }
    return true;
}

double FrontPolygon::signed_distance(const Vec2& q) const {
    const std::size_t n = vertices.size();
    double mindist = std::numeric_limits<double>::infinity();
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        if (cross2(b - a, q - a) < 0.0) inside = false;
        mindist = std::min(mindist, point_segment_distance(q, a, b));
    }
    return inside ? mindist : -mindist;
}

namespace {

struct VertexData {
    std::vector<double> kappa;      // turning angle / mean adjacent edge length
    std::vector<Vec2> inward;       // unit inward normal
    std::vector<double> local_len;  // mean adjacent edge length
};

VertexData measure(const std::vector<Vec2>& v) {
    const std::size_t n = v.size();
    VertexData d;
    d.kappa.resize(n);
    d.inward.resize(n);
    d.local_len.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& prev = v[(i + n - 1) % n];
        const Vec2& next = v[(i + 1) % n];
        const Vec2 e0 = v[i] - prev;
        const Vec2 e1 = next - v[i];
        const double l0 = e0.norm();
        const double l1 = e1.norm();
        const double turning = std::atan2(cross2(e0, e1), e0.dot(e1));
        d.local_len[i] = 0.5 * (l0 + l1);
        d.kappa[i] = turning / std::max(d.local_len[i], 1e-300);
        Vec2 tangent = next - prev;
        const double tn = tangent.norm();
        if (tn > 0.0) tangent /= tn;
        d.inward[i] = Vec2(-tangent.y(), tangent.x());  // CCW: interior on the left
    }
    return d;
}

// Arclength resampling with a parabolic bulge correction so the new vertices
// land on the local arc instead of the chord.
std::vector<Vec2> resample(const std::vector<Vec2>& v, const std::vector<double>& kappa, int n) {
    const std::size_t m = v.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + (v[(i + 1) % m] - v[i]).norm();
    const double per = cum[m];
    std::vector<Vec2> out;
    out.reserve(n);
    std::size_t edge = 0;
    for (int i = 0; i < n; ++i) {
        const double s = per * i / n;
        while (edge + 1 < m && cum[edge + 1] <= s) ++edge;
        const double len = cum[edge + 1] - cum[edge];
        const double u = len > 0.0 ? (s - cum[edge]) / len : 0.0;
        const Vec2& a = v[edge];
        const Vec2& b = v[(edge + 1) % m];
        Vec2 p = a + u * (b - a);
        if (len > 0.0) {
            const double k = (1.0 - u) * kappa[edge] + u * kappa[(edge + 1) % m];
            Vec2 t = (b - a) / len;
            const Vec2 outward(t.y(), -t.x());
            double sag = 0.5 * k * (u * len) * ((1.0 - u) * len);
            sag = std::clamp(sag, -0.3 * len, 0.3 * len);
            p += sag * outward;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

FrontHistory evolve_front(const FrontPolygon& initial, const FrontOptions& opt) {
    if (initial.vertices.size() < 8)
        throw std::invalid_argument("evolve_front: need at least 8 vertices");
    if (!initial.is_convex(1e-8))
        throw std::invalid_argument("evolve_front: initial polygon must be convex");

    FrontHistory hist;
    std::vector<Vec2> cur = initial.vertices;
    if (polygon_area(cur) < 0.0) std::reverse(cur.begin(), cur.end());
    double t = initial.time;
    const double area0 = polygon_area(cur);
    const double area_min = opt.area_stop_fraction * area0;
    const double snap_dt = area0 / (2.0 * kPi) / 800.0;
    double last_snap = -1.0;

    auto snapshot = [&](double area) {
        FrontPolygon f;
        f.vertices = cur;
        f.time = t;
        hist.contours.push_back(std::move(f));
        last_snap = t;
        (void)area;
    };

    double area = area0;
    snapshot(area);
    hist.step_times.push_back(t);
    hist.step_areas.push_back(area);
    {
        FrontPolygon f0;
        f0.vertices = cur;
        hist.step_max_turning.push_back(f0.max_turning_angle());
    }

    int steps = 0;
    while (area > area_min && steps < opt.max_steps) {
        ++steps;
        const VertexData vd = measure(cur);
        double dt = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const double k = std::abs(vd.kappa[i]);
            if (k > 0.0) dt = std::min(dt, opt.displacement_cap * vd.local_len[i] / k);
        }
        dt = std::min(dt, 0.2 * area / (2.0 * kPi));  // do not overshoot extinction
        if (!std::isfinite(dt) || dt <= 0.0)
            throw std::runtime_error("evolve_front: degenerate time step");

        std::vector<Vec2> next;
        bool accepted = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            next.resize(cur.size());
            for (std::size_t i = 0; i < cur.size(); ++i)
                next[i] = cur[i] + dt * vd.kappa[i] * vd.inward[i];
            next = resample(next, vd.kappa, static_cast<int>(cur.size()));
            FrontPolygon probe;
            probe.vertices = next;
            if (probe.is_convex(1e-8) && polygon_area(next) < area) {
                accepted = true;
                break;
            }
            dt *= 0.5;
        }
        if (!accepted)
            throw std::runtime_error("evolve_front: convexity lost, step rejected repeatedly");

        cur = std::move(next);
        t += dt;
        area = polygon_area(cur);

        FrontPolygon probe;
        probe.vertices = cur;
        const double turning = probe.max_turning_angle();
        hist.step_times.push_back(t);
        hist.step_areas.push_back(area);
        hist.step_max_turning.push_back(turning);

        if (t - last_snap >= snap_dt || area < 0.02 * area0) snapshot(area);
    }
    if (steps >= opt.max_steps) throw std::runtime_error("evolve_front: step budget exhausted");

    if (hist.contours.back().time < t) snapshot(area);
    hist.final_area = area;
    hist.extinction_time = t + area / (2.0 * kPi);
    return hist;
}

double arrival_from_front(const FrontHistory& history, const Vec2& query) {
    if (history.contours.empty()) throw std::domain_error("arrival_from_front: empty history");
    const double d0 = history.contours.front().signed_distance(query);
    if (d0 < -1e-12) throw std::domain_error("arrival_from_front: query outside the domain");
    if (d0 <= 1e-12) return 0.0;

    // Containment is monotone along the nested history; bisect for the first
    // contour that no longer encloses the query.
    std::size_t lo = 0;
    std::size_t hi = history.contours.size();
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (history.contours[mid].contains(query))
            lo = mid;
        else
            hi = mid;
    }
    if (hi == history.contours.size()) {
        return 2.0 * history.extinction_time;  // inside the final contour
    }
    const double da = history.contours[lo].signed_distance(query);
    const double db = history.contours[hi].signed_distance(query);
    const double ta = history.contours[lo].time;
    const double tb = history.contours[hi].time;
    double frac = (da - db) > 0.0 ? da / (da - db) : 0.5;
    frac = std::clamp(frac, 0.0, 1.0);
    return 2.0 * (ta + frac * (tb - ta));
}

std::pair<geometry::PolytopeK, double> diverse_truncation(double delta) {
    if (!(delta > 0.0 && delta < 0.5))
        throw std::invalid_argument("diverse_truncation: delta must lie in (0, 1/2)");
    const auto U = geometry::build_isometry(3);

    // Hexagon vertices: per coordinate of the 3-simplex, the two points with
    // that weight equal to 1 - delta.
    std::vector<Eigen::Vector3d> simplex_pts;
    for (int i = 0; i < 3; ++i) {
        for (int other = 0; other < 3; ++other) {
            if (other == i) continue;
            Eigen::Vector3d y = Eigen::Vector3d::Zero();
            y[i] = 1.0 - delta;
            y[other] = delta;
            simplex_pts.push_back(y);
        }
    }
    geometry::PolytopeK K;
    K.dim = 2;
    std::vector<std::pair<double, Vec2>> byangle;
    for (const auto& y : simplex_pts) {
        const Eigen::VectorXd x = geometry::project(U, y);
        byangle.emplace_back(std::atan2(x[1], x[0]), Vec2(x[0], x[1]));
    }
    std::sort(byangle.begin(), byangle.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    K.vertices.resize(2, static_cast<int>(byangle.size()));
    for (int i = 0; i < K.vertices.cols(); ++i) K.vertices.col(i) = byangle[i].second;

    const geometry::PolytopeK base = geometry::simplex_polytope(U);
    K.halfspaces = base.halfspaces;  // weights >= 0
    const double colnorm = std::sqrt(2.0 / 3.0);
    for (int i = 0; i < 3; ++i) {  // weights <= 1 - delta
        geometry::Halfspace hs;
        hs.normal = U.matrix.col(i) / colnorm;
        hs.offset = (2.0 / 3.0 - delta) / colnorm;
        K.halfspaces.push_back(std::move(hs));
    }

    const double expected_max = std::sqrt(3.0) * (1.0 - 3.0 * delta * delta) / (2.0 * kPi);
    return {std::move(K), expected_max};
}

}  // namespace curvarb::mcf2d
