#include "curvarb/portfolio.hpp"

#include <cmath>
#include <stdexcept>

namespace curvarb::portfolio {

double SimplexPath::trace_qcov(std::size_t k) const {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += qcov_at(k, i, i);
    return tr;
}

SimplexPath make_path(int d, std::vector<double> times, std::vector<double> weights) {
    if (d < 2) throw std::invalid_argument("make_path: d >= 2 required");
    const std::size_t n = times.size();
    if (weights.size() != n * static_cast<std::size_t>(d))
        throw std::invalid_argument("make_path: weights size mismatch");
    for (std::size_t k = 1; k < n; ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("make_path: times must be increasing");

    SimplexPath p;
    p.d = d;
    p.times = std::move(times);
    p.weights = std::move(weights);
    p.qcov.assign(n * d * d, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double* prev = p.mu(k - 1);
        const double* cur = p.mu(k);
        double* q = &p.qcov[k * d * d];
        const double* qprev = &p.qcov[(k - 1) * d * d];
        for (int i = 0; i < d; ++i) {
            const double di = cur[i] - prev[i];
            for (int j = 0; j < d; ++j) q[i * d + j] = qprev[i * d + j] + di * (cur[j] - prev[j]);
        }
    }
    return p;
}

SimplexPath to_trace_clock(const SimplexPath& path) {
    SimplexPath p = path;
    for (std::size_t k = 0; k < p.n(); ++k) p.times[k] = path.trace_qcov(k);
    for (std::size_t k = 1; k < p.n(); ++k)
        if (!(p.times[k] > p.times[k - 1]))
            throw std::domain_error("to_trace_clock: trace not strictly increasing");
    return p;
}

double GeneratingFunction::value(const double* x, int d) const {
    switch (tag) {
        case Generating::Quadratic: {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += x[i] * x[i];
            return 1.0 - s;
        }
        case Generating::Entropy: {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s -= x[i] * std::log(x[i]);
            return s;
        }
        case Generating::Geometric: {
            double s = 0.0;
            for (int i = 0; i < d; ++i) s += std::log(x[i]);
            return std::exp(s / d);
        }
    }
    return 0.0;
}

void GeneratingFunction::gradient(const double* x, int d, double* g) const {
    switch (tag) {
        case Generating::Quadratic:
            for (int i = 0; i < d; ++i) g[i] = -2.0 * x[i];
            return;
        case Generating::Entropy:
            for (int i = 0; i < d; ++i) g[i] = -(1.0 + std::log(x[i]));
            return;
        case Generating::Geometric: {
            const double v = value(x, d);
            for (int i = 0; i < d; ++i) g[i] = v / (d * x[i]);
            return;
        }
    }
}

void GeneratingFunction::hessian(const double* x, int d, double* H) const {
    switch (tag) {
        case Generating::Quadratic:
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) H[i * d + j] = (i == j) ? -2.0 : 0.0;
            return;
        case Generating::Entropy:
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) H[i * d + j] = (i == j) ? -1.0 / x[i] : 0.0;
            return;
        case Generating::Geometric: {
            const double v = value(x, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double e = v / (double(d) * d * x[i] * x[j]);
                    if (i == j) e -= v / (d * x[i] * x[i]);
                    H[i * d + j] = e;
                }
            return;
        }
    }
}

std::string GeneratingFunction::name() const {
    switch (tag) {
        case Generating::Quadratic: return "quadratic";
        case Generating::Entropy: return "entropy";
        case Generating::Geometric: return "geometric";
    }
    return "?";
}

namespace {

void require_interior(const SimplexPath& path, const GeneratingFunction& G) {
    if (!G.needs_interior()) return;
    for (std::size_t k = 0; k < path.n(); ++k) {
        const double* x = path.mu(k);
        for (int i = 0; i < path.d; ++i)
            if (!(x[i] > 0.0))
                throw std::domain_error(G.name() +
                                        " generating function requires strictly positive weights");
    }
}

}  // namespace

std::vector<double> accumulate_gamma(const SimplexPath& path, const GeneratingFunction& G) {
    require_interior(path, G);
    const int d = path.d;
    std::vector<double> gamma(path.n(), 0.0);
    std::vector<double> H(d * d);
    for (std::size_t k = 0; k + 1 < path.n(); ++k) {
        const double* cur = path.mu(k);
        const double* nxt = path.mu(k + 1);
        G.hessian(cur, d, H.data());
        double quad = 0.0;
        for (int i = 0; i < d; ++i) {
            const double di = nxt[i] - cur[i];
            for (int j = 0; j < d; ++j) quad += H[i * d + j] * di * (nxt[j] - cur[j]);
        }
        gamma[k + 1] = gamma[k] - 0.5 * quad;
    }
    return gamma;
}

StrategyPath generate_strategy(const SimplexPath& path, const GeneratingFunction& G) {
    const int d = path.d;
    const std::vector<double> gamma = accumulate_gamma(path, G);
    StrategyPath s;
    s.d = d;
    s.times = path.times;
    s.gamma = gamma;
    s.theta.assign(path.n() * d, 0.0);
    s.value.assign(path.n(), 0.0);
    std::vector<double> g(d);
    for (std::size_t k = 0; k < path.n(); ++k) {
        const double* x = path.mu(k);
        G.gradient(x, d, g.data());
        double gdotx = 0.0;
        for (int i = 0; i < d; ++i) gdotx += g[i] * x[i];
        const double cash = G.value(x, d) + gamma[k] - gdotx;
        double v = 0.0;
        for (int i = 0; i < d; ++i) {
            s.theta[k * d + i] = g[i] + cash;
            v += s.theta[k * d + i] * x[i];
        }
        s.value[k] = v;
    }
    return s;
}

VolatilityReport check_sufficient_volatility(const SimplexPath& path, VolatilityCondition cond,
                                             double tolerance) {
    VolatilityReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const int d = path.d;
    double entropy_acc = 0.0;
    for (std::size_t k = 0; k < path.n(); ++k) {
        double margin;
        if (cond == VolatilityCondition::Trace) {
            margin = path.trace_qcov(k) - path.times[k];
        } else {
            if (k > 0) {
                const double* prev = path.mu(k - 1);
                const double* cur = path.mu(k);
                for (int i = 0; i < d; ++i) {
                    if (!(prev[i] > 0.0))
                        throw std::domain_error("entropy condition requires positive weights");
                    const double di = cur[i] - prev[i];
                    entropy_acc += di * di / prev[i];
                }
            }
            margin = entropy_acc - path.times[k];
        }
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_time = path.times[k];
        }
    }
    rep.satisfied = rep.worst_margin >= -tolerance;
    return rep;
}

ArbitrageReport verify_relative_arbitrage(const SimplexPath& path, const StrategyPath& strategy,
                                          double T) {
    if (path.n() != strategy.times.size())
        throw std::invalid_argument("verify_relative_arbitrage: path/strategy mismatch");
    if (T > path.times.back() + 1e-12)
        throw std::invalid_argument("verify_relative_arbitrage: horizon exceeds the path");

    std::size_t nT = 0;
    while (nT + 1 < path.n() && path.times[nT + 1] <= T + 1e-12) ++nT;

    ArbitrageReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    const int d = path.d;
    double traded = 0.0;
    double cubic = 0.0;
    for (std::size_t k = 0; k <= nT; ++k) {
        rep.min_value = std::min(rep.min_value, strategy.value[k]);
        if (k < nT) {
            const double* cur = path.mu(k);
            const double* nxt = path.mu(k + 1);
            double dot = 0.0;
            double norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double di = nxt[i] - cur[i];
                dot += strategy.theta[k * d + i] * di;
                norm2 += di * di;
            }
            traded += dot;
            cubic += norm2 * std::sqrt(norm2);
        }
    }
    rep.gain = strategy.value[nT] - strategy.value[0];
    rep.nonneg = rep.min_value >= -1e-12;
    rep.self_financing_residual = std::abs(rep.gain - traded);
    rep.residual_bound = 10.0 * cubic;
    return rep;
}

}  // namespace curvarb::portfolio
