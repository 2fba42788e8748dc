#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curvarb/mincurv.hpp"

namespace curvarb::mincurv {

Candidate quadratic_candidate(int dim) {
    Candidate c;
    c.id = "quadratic";
    c.value = [dim](const Eigen::VectorXd& x) {
        return double(dim) / (dim + 1.0) - x.squaredNorm();
    };
    c.gradient = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(-2.0 * x); };
    c.hessian = [dim](const Eigen::VectorXd&) {
        return Eigen::MatrixXd(-2.0 * Eigen::MatrixXd::Identity(dim, dim));
    };
    return c;
}

Candidate inscribed_ball_candidate(int dim, double inradius) {
    Candidate c;
    c.id = "inscribed-ball";
    const double r2 = inradius * inradius;
    c.value = [r2](const Eigen::VectorXd& x) { return std::max(0.0, r2 - x.squaredNorm()); };
    c.gradient = [r2](const Eigen::VectorXd& x) {
        if (x.squaredNorm() < r2) return Eigen::VectorXd(-2.0 * x);
        return Eigen::VectorXd(Eigen::VectorXd::Zero(x.size()));
    };
    c.hessian = [r2, dim](const Eigen::VectorXd& x) {
        if (x.squaredNorm() < r2)
            return Eigen::MatrixXd(-2.0 * Eigen::MatrixXd::Identity(dim, dim));
        return Eigen::MatrixXd(Eigen::MatrixXd::Zero(dim, dim));
    };
    return c;
}

Candidate polynomial_candidate(int dim, const std::vector<PolyTerm>& terms) {
    for (const auto& t : terms)
        if (static_cast<int>(t.exponents.size()) != dim)
            throw std::invalid_argument("polynomial_candidate: exponent arity mismatch");
    auto shared = std::make_shared<std::vector<PolyTerm>>(terms);
    Candidate c;
    c.id = "polynomial";
    auto powi = [](double x, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= x;
        return r;
    };
    c.value = [shared, powi](const Eigen::VectorXd& x) {
        double s = 0.0;
        for (const auto& t : *shared) {
            double m = t.coeff;
            for (int d = 0; d < x.size(); ++d) m *= powi(x[d], t.exponents[d]);
            s += m;
        }
        return s;
    };
    c.gradient = [shared, powi](const Eigen::VectorXd& x) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
        for (const auto& t : *shared) {
            for (int gd = 0; gd < x.size(); ++gd) {
                if (t.exponents[gd] == 0) continue;
                double m = t.coeff * t.exponents[gd];
                for (int d = 0; d < x.size(); ++d) {
                    const int e = t.exponents[d] - (d == gd ? 1 : 0);
                    m *= powi(x[d], e);
                }
                g[gd] += m;
            }
        }
        return g;
    };
    c.hessian = [shared, powi](const Eigen::VectorXd& x) {
        const int n = static_cast<int>(x.size());
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        for (const auto& t : *shared) {
            for (int a = 0; a < n; ++a) {
                for (int b = a; b < n; ++b) {
                    double factor;
                    if (a == b)
                        factor = double(t.exponents[a]) * (t.exponents[a] - 1);
                    else
                        factor = double(t.exponents[a]) * t.exponents[b];
                    if (factor == 0.0) continue;
                    double m = t.coeff * factor;
                    for (int d = 0; d < n; ++d) {
                        int e = t.exponents[d];
                        if (d == a) e -= 1;
                        if (d == b) e -= 1;
                        m *= powi(x[d], e);
                    }
                    H(a, b) += m;
                    if (a != b) H(b, a) += m;
                }
            }
        }
        return H;
    };
    return c;
}

template <int D>
Candidate grid_candidate(std::shared_ptr<const MinCurvField<D>> field) {
    Candidate c;
    c.id = "grid-field";
    const double h = field->grid.h;
    auto interp = [field](const Eigen::VectorXd& x) {
        Eigen::Matrix<double, D, 1> p;
        for (int d = 0; d < D; ++d) p[d] = x[d];
        return field->grid.interpolate(p);
    };
    c.value = interp;
    c.gradient = [interp, h](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(x.size());
        for (int d = 0; d < x.size(); ++d) {
            Eigen::VectorXd xp = x, xm = x;
            xp[d] += h;
            xm[d] -= h;
            g[d] = (interp(xp) - interp(xm)) / (2.0 * h);
        }
        return g;
    };
    c.hessian = [interp, h](const Eigen::VectorXd& x) {
        const int n = static_cast<int>(x.size());
        Eigen::MatrixXd H(n, n);
        const double f0 = interp(x);
        for (int a = 0; a < n; ++a) {
            Eigen::VectorXd xp = x, xm = x;
            xp[a] += h;
            xm[a] -= h;
            H(a, a) = (interp(xp) - 2.0 * f0 + interp(xm)) / (h * h);
            for (int b = a + 1; b < n; ++b) {
                Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[a] += h; xpp[b] += h;
                xpm[a] += h; xpm[b] -= h;
                xmp[a] -= h; xmp[b] += h;
                xmm[a] -= h; xmm[b] -= h;
                H(a, b) = H(b, a) =
                    (interp(xpp) - interp(xpm) - interp(xmp) + interp(xmm)) / (4.0 * h * h);
            }
        }
        return H;
    };
    return c;
}

template Candidate grid_candidate<2>(std::shared_ptr<const MinCurvField<2>>);
template Candidate grid_candidate<3>(std::shared_ptr<const MinCurvField<3>>);

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::SubsolutionEvidence: return "subsolution-evidence";
        case Verdict::SupersolutionEvidence: return "supersolution-evidence";
        case Verdict::Neither: return "neither";
    }
    return "?";
}

namespace {

double halton(std::uint64_t i, int base) {
    double f = 1.0;
    double r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

}  // namespace

CertificateReport check_certificate(const Candidate& cand, const geometry::PolytopeK& K,
                                    int samples, double tol) {
    if (samples < 1) throw std::invalid_argument("check_certificate: need samples >= 1");
    const int dim = K.dim;
    static const int bases[] = {2, 3, 5, 7, 11};

    CertificateReport rep;
    rep.candidate_id = cand.id;
    rep.samples = samples;
    rep.residual_min = std::numeric_limits<double>::infinity();
    rep.residual_max = -rep.residual_min;
    rep.residuals.reserve(samples);

    Eigen::VectorXd lo = K.vertices.rowwise().minCoeff();
    Eigen::VectorXd hi = K.vertices.rowwise().maxCoeff();

    double wmin = std::numeric_limits<double>::infinity();
    double wmax = -wmin;
    auto visit = [&](const Eigen::VectorXd& x) {
        const double w = cand.value(x);
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
        const double res = f_operator(cand.gradient(x), cand.hessian(x));
        rep.residual_min = std::min(rep.residual_min, res);
        rep.residual_max = std::max(rep.residual_max, res);
        rep.residuals.push_back(res);
    };

    // Quasi-random interior points plus the center.
    visit(Eigen::VectorXd::Zero(dim));
    std::uint64_t iter = 1;
    int accepted = 1;
    while (accepted < samples) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d)
            x[d] = lo[d] + (hi[d] - lo[d]) * halton(iter, bases[d]);
        ++iter;
        if (geometry::signed_boundary_distance(K, x) <= 1e-12) continue;
        visit(x);
        ++accepted;
    }
    rep.bound_value = wmax;

    // Boundary trace on vertices and edge midlines; nonnegativity over K.
    double edge_trace = 0.0;
    const int nv = static_cast<int>(K.vertices.cols());
    for (int i = 0; i < nv; ++i) {
        edge_trace = std::max(edge_trace, std::abs(cand.value(K.vertices.col(i))));
        for (int j = i + 1; j < nv; ++j) {
            for (int s = 1; s < 8; ++s) {
                const double tpar = s / 8.0;
                const Eigen::VectorXd x =
                    (1.0 - tpar) * K.vertices.col(i) + tpar * K.vertices.col(j);
                // Only true edges of K lie on its boundary; skip interior chords.
                if (geometry::signed_boundary_distance(K, x) > 1e-9) continue;
                edge_trace = std::max(edge_trace, std::abs(cand.value(x)));
            }
        }
    }
    rep.boundary_admissible = edge_trace <= 1e-9 && wmin >= -1e-9;

    const bool sub_ok = rep.residual_max <= 1.0 + tol && rep.boundary_admissible;
    const bool sup_ok = rep.residual_min >= 1.0 - tol && wmin >= -1e-9;
    if (sub_ok)
        rep.verdict = Verdict::SubsolutionEvidence;
    else if (sup_ok)
        rep.verdict = Verdict::SupersolutionEvidence;
    else
        rep.verdict = Verdict::Neither;
    return rep;
}

}  // namespace curvarb::mincurv
