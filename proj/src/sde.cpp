#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curvarb/parallel.hpp"
#include "curvarb/rng.hpp"
#include "curvarb/sde.hpp"

namespace curvarb::sde {

namespace {

class AnalyticDisk final : public WField {
public:
    double value(const Vec2& x) const override { return 1.0 - x.squaredNorm(); }
    Vec2 gradient(const Vec2& x) const override { return -2.0 * x; }
    double switch_threshold() const override { return 1e-4; }
    double max_value() const override { return 1.0; }
};

class GridWField final : public WField {
public:
    explicit GridWField(const Grid2& grid) : g_(grid) {
        const int nx = g_.dims[0];
        const int ny = g_.dims[1];
        gx_.assign(g_.size(), 0.0);
        gy_.assign(g_.size(), 0.0);
        std::vector<double> hess_norms;
        const double h = g_.h;
        auto at = [&](int i, int j) { return g_.values[g_.index({i, j})]; };
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = g_.index({i, j});
                const int il = std::max(i - 1, 0);
                const int ir = std::min(i + 1, nx - 1);
                const int jd = std::max(j - 1, 0);
                const int ju = std::min(j + 1, ny - 1);
                gx_[k] = (at(ir, j) - at(il, j)) / ((ir - il) * h);
                gy_[k] = (at(i, ju) - at(i, jd)) / ((ju - jd) * h);
                if (g_.inside[k] && i > 0 && i + 1 < nx && j > 0 && j + 1 < ny) {
                    const double wxx = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h * h);
                    const double wyy = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (h * h);
                    const double wxy = (at(i + 1, j + 1) + at(i - 1, j - 1) - at(i + 1, j - 1) -
                                        at(i - 1, j + 1)) /
                                       (4.0 * h * h);
                    hess_norms.push_back(
                        std::sqrt(wxx * wxx + wyy * wyy + 2.0 * wxy * wxy));
                }
            }
        }
        double hest = 2.0;
        if (!hess_norms.empty()) {
            std::nth_element(hess_norms.begin(), hess_norms.begin() + hess_norms.size() / 2,
                             hess_norms.end());
            hest = hess_norms[hess_norms.size() / 2];
        }
        gmin_ = std::max(10.0 * h * hest, 1e-4);
        maxv_ = 0.0;
        for (std::size_t k = 0; k < g_.size(); ++k)
            if (g_.inside[k]) maxv_ = std::max(maxv_, g_.values[k]);
    }

    double value(const Vec2& x) const override { return g_.interpolate(x); }
    Vec2 gradient(const Vec2& x) const override {
        return Vec2(g_.interpolate(gx_, x), g_.interpolate(gy_, x));
    }
    double switch_threshold() const override { return gmin_; }
    double max_value() const override { return maxv_; }

private:
    Grid2 g_;
    std::vector<double> gx_, gy_;
    double gmin_ = 1e-4;
    double maxv_ = 0.0;
};

struct Recorder {
    PlanarPath* path;
    long stride;
    long count = 0;

    void operator()(double t, const Vec2& x, double trace, bool force = false) {
        if (stride > 0 && (force || count % stride == 0)) {
            path->times.push_back(t);
            path->points.push_back(x);
            path->realized_trace.push_back(trace);
        } else if (stride == 0 && force) {
            path->times.push_back(t);
            path->points.push_back(x);
            path->realized_trace.push_back(trace);
        }
        ++count;
    }
};

}  // namespace

std::shared_ptr<WField> analytic_disk_field() { return std::make_shared<AnalyticDisk>(); }

std::shared_ptr<WField> grid_field(const Grid2& grid) {
    return std::make_shared<GridWField>(grid);
}

PlanarPath simulate_circle(const Vec2& x0, const mcf2d::Domain2D& domain, const SimConfig& cfg,
                           long path_index) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate_circle: dt must be positive");
    PlanarPath out;
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    const double t_max = cfg.t_max > 0.0 ? cfg.t_max : 2.0;
    Recorder rec{&out, cfg.record_stride};

    Vec2 x = x0;
    double t = 0.0;
    double trace = 0.0;
    double sd = domain.signed_distance(x);
    rec(t, x, trace, true);

    for (std::uint64_t step = 0; t < t_max; ++step) {
        const double z = normal_pair(cfg.seed, static_cast<std::uint64_t>(path_index), step).z0;
        const double dw = sqdt * z;
        Vec2 dx;
        const double r = x.norm();
        if (r < 1e-300) {
            dx = Vec2(dw, 0.0);
        } else {
            const Vec2 dir = circle_direction(x);
            dx = dir * (dw / r);
        }
        const Vec2 xn = x + dx;
        trace += dx.squaredNorm();
        const double sdn = domain.signed_distance(xn);
        if (sdn < 0.0) {
            const double frac = sd > 0.0 ? sd / (sd - sdn) : 0.0;
            out.exit_time = t + frac * dt;
            out.exit_point = x + frac * dx;
            out.final_time = out.exit_time;
            out.final_trace = trace;
            rec(out.exit_time, out.exit_point, trace, true);
            return out;
        }
        x = xn;
        sd = sdn;
        t += dt;
        rec(t, x, trace);
    }
    out.censored = true;
    out.final_time = t;
    out.final_trace = trace;
    rec(t, x, trace, true);
    return out;
}

PlanarPath simulate_skew_gradient(const Vec2& x0, const WField& field,
                                  const mcf2d::Domain2D& domain, const SimConfig& cfg,
                                  long path_index) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate_skew_gradient: dt must be positive");
    if (!(domain.signed_distance(x0) > 0.0))
        throw std::domain_error("simulate_skew_gradient: start point not strictly inside");

    PlanarPath out;
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    const double gmin = field.switch_threshold();
    const double t_max = cfg.t_max > 0.0 ? cfg.t_max : 2.0 * field.max_value();
    const double w0 = field.value(x0);
    Recorder rec{&out, cfg.record_stride};

    Vec2 x = x0;
    double t = 0.0;
    double trace = 0.0;
    double sd = domain.signed_distance(x);
    rec(t, x, trace, true);

    for (std::uint64_t step = 0; t < t_max; ++step) {
        const NormalPair z = normal_pair(cfg.seed, static_cast<std::uint64_t>(path_index), step);
        Vec2 dx;
        const Vec2 grad = field.gradient(x);
        const double gn = grad.norm();
        if (gn >= gmin) {
            const Vec2 dir(-grad.y() / gn, grad.x() / gn);
            dx = dir * (sqdt * z.z0);
        } else {
            dx = Vec2(z.z0, z.z1) * (sqdt * M_SQRT1_2);
        }
        const Vec2 xn = x + dx;
        trace += dx.squaredNorm();
        const double sdn = domain.signed_distance(xn);
        if (sdn < 0.0) {
            const double frac = sd > 0.0 ? sd / (sd - sdn) : 0.0;
            out.exit_time = t + frac * dt;
            out.exit_point = x + frac * dx;
            out.final_time = out.exit_time;
            out.final_trace = trace;
            rec(out.exit_time, out.exit_point, trace, true);
            return out;
        }
        x = xn;
        sd = sdn;
        t += dt;
        if (cfg.track_levels) {
            const double dev = std::abs(field.value(x) - (w0 - t));
            out.max_level_deviation = std::max(out.max_level_deviation, dev);
        }
        rec(t, x, trace);
    }
    out.censored = true;
    out.final_time = t;
    out.final_trace = trace;
    rec(t, x, trace, true);
    return out;
}

PlanarPath simulate_market_plane(const Vec2& x0, const WField& field,
                                 const geometry::PolytopeK& K, const SimConfig& cfg, double t_end,
                                 long path_index) {
    const mcf2d::Domain2D domain = mcf2d::Domain2D::from_polytope(K);
    SimConfig inner = cfg;
    inner.t_max = t_end;
    PlanarPath p = simulate_skew_gradient(x0, field, domain, inner, path_index);
    if (p.censored || p.final_time >= t_end) return p;

    // Continue along the exit edge with a reflected unit-trace motion so the
    // lifted market stays on the simplex while the trace clock keeps running.
    int active = 0;
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < K.halfspaces.size(); ++i) {
        const auto& hs = K.halfspaces[i];
        const double s = hs.offset - hs.normal.head<2>().dot(p.exit_point);
        if (s < slack) {
            slack = s;
            active = static_cast<int>(i);
        }
    }
    std::vector<Vec2> edge_pts;
    for (int i = 0; i < K.vertices.cols(); ++i) {
        const Vec2 v = K.vertices.col(i).head<2>();
        if (std::abs(K.halfspaces[active].normal.head<2>().dot(v) - K.halfspaces[active].offset) <
            1e-9)
            edge_pts.push_back(v);
    }
    if (edge_pts.size() != 2)
        throw std::runtime_error("simulate_market_plane: exit edge not identified");
    const Vec2 a = edge_pts[0];
    const Vec2 b = edge_pts[1];
    const double len = (b - a).norm();
    const Vec2 ev = (b - a) / len;

    double s = std::clamp(ev.dot(p.exit_point - a), 0.0, len);
    double t = p.final_time;
    double trace = p.final_trace;
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    // Continue the same per-path stream beyond the steps already consumed.
    std::uint64_t step = static_cast<std::uint64_t>(std::ceil(t / dt)) + 1;
    Recorder rec{&p, cfg.record_stride, static_cast<long>(p.times.size())};

    while (t < t_end) {
        const double z = normal_pair(cfg.seed, static_cast<std::uint64_t>(path_index), step).z0;
        ++step;
        double sn = s + sqdt * z;
        for (int fold = 0; fold < 64 && (sn < 0.0 || sn > len); ++fold)
            sn = sn < 0.0 ? -sn : 2.0 * len - sn;
        sn = std::clamp(sn, 0.0, len);
        const double ds = sn - s;
        trace += ds * ds;
        s = sn;
        t += dt;
        rec(t, a + s * ev, trace, t + dt > t_end);
    }
    p.final_time = t;
    p.final_trace = trace;
    return p;
}

portfolio::SimplexPath to_market_path(const PlanarPath& path, const geometry::IsometryMap& U) {
    const int d = U.d();
    std::vector<double> weights;
    weights.reserve(path.points.size() * d);
    for (const Vec2& x : path.points) {
        Eigen::VectorXd xe(U.dim());
        xe[0] = x.x();
        if (U.dim() > 1) xe[1] = x.y();
        Eigen::VectorXd y = geometry::lift(U, xe);
        for (int i = 0; i < d; ++i) {
            double v = y[i];
            if (v < 0.0 && v > -1e-12) v = 0.0;  // edge paths graze zero
            weights.push_back(v);
        }
    }
    return portfolio::make_path(d, path.times, std::move(weights));
}

ExitStats exit_time_statistics(const std::vector<double>& taus,
                               const std::vector<std::uint8_t>& censored, int histogram_bins,
                               std::uint64_t bootstrap_seed) {
    const std::size_t n = taus.size();
    if (n == 0) throw std::invalid_argument("exit_time_statistics: empty ensemble");
    if (censored.size() != n)
        throw std::invalid_argument("exit_time_statistics: censored flag size mismatch");

    ExitStats st;
    st.n = static_cast<long>(n);
    for (std::uint8_t c : censored) st.n_censored += c ? 1 : 0;
    st.censor_fraction = double(st.n_censored) / double(n);

    std::vector<double> sorted = taus;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [](const std::vector<double>& s, double p) {
        const std::size_t m = s.size();
        std::size_t idx = static_cast<std::size_t>(std::ceil(p * m));
        idx = idx > 0 ? idx - 1 : 0;
        return s[std::min(idx, m - 1)];
    };
    st.essinf_estimate = quantile(sorted, 0.01);

    double mean = 0.0;
    for (double t : taus) mean += t;
    mean /= n;
    double var = 0.0;
    for (double t : taus) var += (t - mean) * (t - mean);
    st.mean = mean;
    st.stddev = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;

    // Bootstrap the low quantile (1000 resamples).
    std::vector<double> boot(1000);
    std::vector<double> resample(n);
    for (std::size_t b = 0; b < boot.size(); ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = uniform01(bootstrap_seed, b, i);
            resample[i] = taus[std::min(n - 1, static_cast<std::size_t>(u * n))];
        }
        std::sort(resample.begin(), resample.end());
        boot[b] = quantile(resample, 0.01);
    }
    std::sort(boot.begin(), boot.end());
    st.ci_lo = boot[static_cast<std::size_t>(0.025 * boot.size())];
    st.ci_hi = boot[static_cast<std::size_t>(0.975 * boot.size())];

    st.hist_lo = sorted.front();
    st.hist_hi = sorted.back();
    st.histogram.assign(histogram_bins, 0);
    const double width = std::max(st.hist_hi - st.hist_lo, 1e-300);
    for (double t : taus) {
        int bin = static_cast<int>((t - st.hist_lo) / width * histogram_bins);
        bin = std::clamp(bin, 0, histogram_bins - 1);
        ++st.histogram[bin];
    }
    return st;
}

ExitStats exit_time_statistics(const std::vector<PlanarPath>& ensemble) {
    std::vector<double> taus;
    std::vector<std::uint8_t> cens;
    taus.reserve(ensemble.size());
    for (const auto& p : ensemble) {
        taus.push_back(p.censored ? p.final_time : p.exit_time);
        cens.push_back(p.censored ? 1 : 0);
    }
    return exit_time_statistics(taus, cens);
}

namespace {

template <typename Simulate>
EnsembleSummary run_ensemble(long n_paths, int threads, Simulate&& sim) {
    EnsembleSummary out;
    const std::size_t n = static_cast<std::size_t>(n_paths);
    out.taus.resize(n);
    out.censored.resize(n);
    out.final_traces.resize(n);
    out.final_times.resize(n);
    out.level_deviations.resize(n);
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const PlanarPath p = sim(static_cast<long>(i));
            out.taus[i] = p.censored ? p.final_time : p.exit_time;
            out.censored[i] = p.censored ? 1 : 0;
            out.final_traces[i] = p.final_trace;
            out.final_times[i] = p.final_time;
            out.level_deviations[i] = p.max_level_deviation;
        }
    });
    return out;
}

}  // namespace

EnsembleSummary run_circle_ensemble(const Vec2& x0, const mcf2d::Domain2D& domain,
                                    const SimConfig& cfg) {
    SimConfig c = cfg;
    c.record_stride = 0;  // summaries only
    return run_ensemble(cfg.n_paths, cfg.threads,
                        [&](long i) { return simulate_circle(x0, domain, c, i); });
}

EnsembleSummary run_skew_ensemble(const Vec2& x0, const WField& field,
                                  const mcf2d::Domain2D& domain, const SimConfig& cfg) {
    SimConfig c = cfg;
    c.record_stride = 0;
    return run_ensemble(cfg.n_paths, cfg.threads,
                        [&](long i) { return simulate_skew_gradient(x0, field, domain, c, i); });
}

}  // namespace curvarb::sde
