#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace curvarb::portfolio {

// Discrete market-weight trajectory with its realized quadratic covariation.
// qcov(t_n) = sum_{k<n} outer(dmu_k); stored row-major d*d per node.
struct SimplexPath {
    int d = 0;
    std::vector<double> times;
    std::vector<double> weights;  // N x d
    std::vector<double> qcov;     // N x d*d

    std::size_t n() const { return times.size(); }
    const double* mu(std::size_t k) const { return &weights[k * d]; }
    double qcov_at(std::size_t k, int i, int j) const { return qcov[k * d * d + i * d + j]; }
    double trace_qcov(std::size_t k) const;
};

// Builds path accounting (qcov) from raw times/weights.
SimplexPath make_path(int d, std::vector<double> times, std::vector<double> weights);

// Re-times a path by its realized trace clock: times[n] := tr qcov(t_n).
// Requires strictly increasing trace.
SimplexPath to_trace_clock(const SimplexPath& path);

enum class Generating { Quadratic, Entropy, Geometric };

// Concave generating function on the simplex with analytic derivatives.
// Quadratic: 1 - |x|^2.  Entropy: -sum x log x.  Geometric: prod x^{1/d}.
struct GeneratingFunction {
    Generating tag = Generating::Quadratic;

    double value(const double* x, int d) const;
    void gradient(const double* x, int d, double* g) const;
    void hessian(const double* x, int d, double* H) const;  // row-major d*d
    bool needs_interior() const { return tag != Generating::Quadratic; }
    std::string name() const;
};

struct StrategyPath {
    int d = 0;
    std::vector<double> times;
    std::vector<double> theta;  // N x d
    std::vector<double> value;  // N
    std::vector<double> gamma;  // N
};

// Gamma^G(t_n) = -(1/2) sum_{k<n} sum_ij d2G_ij(mu(t_k)) dmu_i dmu_j.
// Throws std::domain_error if G needs interior weights and the path touches
// the boundary.
std::vector<double> accumulate_gamma(const SimplexPath& path, const GeneratingFunction& G);

// theta = grad G(mu) + (G(mu) + Gamma - grad G(mu).mu) * ones; value = theta.mu.
StrategyPath generate_strategy(const SimplexPath& path, const GeneratingFunction& G);

enum class VolatilityCondition { Trace, Entropy };

struct VolatilityReport {
    bool satisfied = false;
    double worst_margin = 0.0;
    double worst_time = 0.0;
};

VolatilityReport check_sufficient_volatility(const SimplexPath& path,
                                             VolatilityCondition cond,
                                             double tolerance = 0.0);

struct ArbitrageReport {
    bool nonneg = false;
    double gain = 0.0;
    double min_value = 0.0;
    double self_financing_residual = 0.0;
    double residual_bound = 0.0;  // 10 * sum |dmu|^3
};

// Evaluates the strategy on [0, T] (T must not exceed the final grid time).
ArbitrageReport verify_relative_arbitrage(const SimplexPath& path,
                                          const StrategyPath& strategy, double T);

}  // namespace curvarb::portfolio
