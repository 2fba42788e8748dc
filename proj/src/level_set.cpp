#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "curvarb/mcf2d.hpp"
#include "curvarb/parallel.hpp"

namespace curvarb::mcf2d {

namespace {

constexpr double kPi = std::numbers::pi;

// First-order fast sweeping reinitialization of |phi| to a distance function,
// keeping the sign pattern and the zero level set fixed.
void reinit_fast_sweeping(Grid2& g, std::vector<double>& phi) {
    const int nx = g.dims[0];
    const int ny = g.dims[1];
    const double h = g.h;
    const std::size_t n = phi.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::uint8_t> frozen(n, 0);

    auto id = [&](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };

    // Interface band: nodes with a sign change toward any axis neighbor get a
    // sub-cell distance estimate by linear interpolation.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = id(i, j);
            const double p = phi[k];
            if (p == 0.0) {
                dist[k] = 0.0;
                frozen[k] = 1;
                continue;
            }
            double dx = std::numeric_limits<double>::infinity();
            double dy = std::numeric_limits<double>::infinity();
            auto probe = [&](int ii, int jj, double& best) {
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) return;
                const double q = phi[id(ii, jj)];
                if (p * q < 0.0) {
                    const double est = h * std::abs(p) / (std::abs(p) + std::abs(q));
                    best = std::min(best, est);
                }
            };
            probe(i - 1, j, dx);
            probe(i + 1, j, dx);
            probe(i, j - 1, dy);
            probe(i, j + 1, dy);
            if (std::isfinite(dx) || std::isfinite(dy)) {
                double d;
                if (std::isfinite(dx) && std::isfinite(dy))
                    d = dx * dy / std::sqrt(dx * dx + dy * dy);
                else
                    d = std::min(dx, dy);
                dist[k] = d;
                frozen[k] = 1;
            }
        }
    }

    auto solve_node = [&](int i, int j) {
        const std::size_t k = id(i, j);
        if (frozen[k]) return;
        double a = std::numeric_limits<double>::infinity();
        double b = a;
        if (i > 0) a = std::min(a, dist[id(i - 1, j)]);
        if (i + 1 < nx) a = std::min(a, dist[id(i + 1, j)]);
        if (j > 0) b = std::min(b, dist[id(i, j - 1)]);
        if (j + 1 < ny) b = std::min(b, dist[id(i, j + 1)]);
        double u;
        if (!std::isfinite(a) && !std::isfinite(b)) return;
        if (std::abs(a - b) >= h) {
            u = std::min(a, b) + h;
        } else {
            const double s = a - b;
            u = 0.5 * (a + b + std::sqrt(2.0 * h * h - s * s));
        }
        dist[k] = std::min(dist[k], u);
    };

    for (int round = 0; round < 2; ++round) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) solve_node(i, j);
        for (int j = 0; j < ny; ++j)
            for (int i = nx - 1; i >= 0; --i) solve_node(i, j);
        for (int j = ny - 1; j >= 0; --j)
            for (int i = 0; i < nx; ++i) solve_node(i, j);
        for (int j = ny - 1; j >= 0; --j)
            for (int i = nx - 1; i >= 0; --i) solve_node(i, j);
    }

    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(dist[k])) dist[k] = 10.0 * std::max(nx, ny) * h;
        phi[k] = (phi[k] > 0.0) ? dist[k] : (phi[k] < 0.0 ? -dist[k] : 0.0);
    }
}

}  // namespace

ArrivalField arrival_grid(const Domain2D& domain, double h, const ArrivalOptions& opt) {
    Vec2 lo, hi;
    domain.bounding_box(lo, hi);
    const double inradius = domain.signed_distance(Vec2::Zero());
    if (!(h > 0.0) || inradius / h < 40.0)
        throw std::invalid_argument("arrival_grid: grid too coarse (need >= 40 nodes per inradius)");

    const double margin = 6.0 * h;
    ArrivalField field;
    Grid2& g = field.grid;
    g.origin = Vec2(lo.x() - margin, lo.y() - margin);
    g.h = h;
    g.dims[0] = static_cast<int>(std::ceil((hi.x() - lo.x() + 2.0 * margin) / h)) + 1;
    g.dims[1] = static_cast<int>(std::ceil((hi.y() - lo.y() + 2.0 * margin) / h)) + 1;
    const int nx = g.dims[0];
    const int ny = g.dims[1];
    const std::size_t n = g.size();

    std::vector<double> phi(n), phinew(n);
    g.inside.assign(n, 0);
    g.values.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> fixed_zero(n, 0);

    long npos = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * nx + i;
            const Vec2 x = g.point({i, j});
            const double sd = domain.signed_distance(x);
            phi[k] = sd;
            if (sd > 0.0) {
                g.inside[k] = 1;
                ++npos;
                if (sd < opt.band_width_cells * h) {
                    g.values[k] = 0.0;  // boundary band
                    fixed_zero[k] = 1;
                }
            } else {
                g.values[k] = 0.0;
            }
        }
    }

    const double dt = opt.dt_factor * h * h;
    const double area_cutoff = (10.0 * h) * (10.0 * h);
    const double band = 6.0 * h;
    std::vector<std::size_t> active;
    auto rebuild_active = [&]() {
        active.clear();
        for (int j = 1; j + 1 < ny; ++j)
            for (int i = 1; i + 1 < nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * nx + i;
                if (std::abs(phi[k]) <= band) active.push_back(k);
            }
    };
    rebuild_active();

    double t = 0.0;
    field.area_times.push_back(t);
    field.areas.push_back(npos * h * h);

    long step = 0;
    const double inv2h = 1.0 / (2.0 * h);
    const double invh2 = 1.0 / (h * h);
    const double inv4h2 = 1.0 / (4.0 * h * h);

    while (npos * h * h > area_cutoff) {
        ++step;
        phinew = phi;

        const int nthreads = std::max(1, opt.threads);
        std::atomic<long> npos_delta{0};

        parallel_for(active.size(), nthreads, [&](std::size_t a0, std::size_t a1) {
            long delta = 0;
            for (std::size_t a = a0; a < a1; ++a) {
                const std::size_t k = active[a];
                const double c = phi[k];
                const double pl = phi[k - 1];
                const double pr = phi[k + 1];
                const double pd = phi[k - nx];
                const double pu = phi[k + nx];
                const double px = (pr - pl) * inv2h;
                const double py = (pu - pd) * inv2h;
                const double pxx = (pr - 2.0 * c + pl) * invh2;
                const double pyy = (pu - 2.0 * c + pd) * invh2;
                const double pxy =
                    (phi[k + nx + 1] + phi[k - nx - 1] - phi[k + nx - 1] - phi[k - nx + 1]) *
                    inv4h2;
                const double den = px * px + py * py;
                double upd;
                if (den > 1e-12) {
                    upd = 0.5 * (pxx * py * py - 2.0 * px * py * pxy + pyy * px * px) / den;
                } else {
                    upd = 0.25 * (pxx + pyy);
                }
                const double nv = c + dt * upd;
                phinew[k] = nv;
                if (c > 0.0 && nv <= 0.0) {
                    --delta;
                    if (g.inside[k] && !fixed_zero[k] && std::isnan(g.values[k])) {
                        const double frac = c / (c - nv);
                        g.values[k] = t + frac * dt;
                    }
                } else if (c <= 0.0 && nv > 0.0) {
                    ++delta;
                }
            }
            npos_delta += delta;
        });
        npos += npos_delta.load();

        std::swap(phi, phinew);
        t += dt;

        if (step % opt.reinit_every == 0) {
            reinit_fast_sweeping(g, phi);
            rebuild_active();
            field.area_times.push_back(t);
            field.areas.push_back(npos * h * h);
        }
        if (npos <= 0) break;
    }

    // Area-law patch for the final cap: the enclosed area of the half-speed
    // flow shrinks at rate pi, so the remaining arrival is area/pi.
    const double w_final = t + (npos > 0 ? npos * h * h / kPi : 0.0);
    field.extinction_time = w_final;
    for (std::size_t k = 0; k < n; ++k) {
        if (g.inside[k] && std::isnan(g.values[k])) g.values[k] = w_final;
    }

    field.max_value = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (g.inside[k] && g.values[k] > field.max_value) {
            field.max_value = g.values[k];
            const auto c = g.coords(k);
            field.critical_point = g.point(c);
        }
    }
    return field;
}

}  // namespace curvarb::mcf2d
