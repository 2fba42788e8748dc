#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "curvarb/mincurv.hpp"

namespace curvarb::mincurv {

Eigen::MatrixXd orthogonal_basis(const Eigen::VectorXd& p) {
    const int n = static_cast<int>(p.size());
    const Eigen::VectorXd ph = p / p.norm();
    // Householder reflection mapping e1 to ph; the remaining columns span
    // the orthogonal complement.
    Eigen::VectorXd v = ph;
    v[0] -= 1.0;
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    const double vn2 = v.squaredNorm();
    if (vn2 > 1e-28) H -= (2.0 / vn2) * (v * v.transpose());
    return H.rightCols(n - 1);
}

double f_operator(const Eigen::VectorXd& p, const Eigen::MatrixXd& M, double sym_tol) {
    const int n = static_cast<int>(M.rows());
    if (M.cols() != n) throw std::invalid_argument("f_operator: M must be square");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > sym_tol)
        throw std::invalid_argument("f_operator: M must be symmetric");
    if (p.size() != n) throw std::invalid_argument("f_operator: dimension mismatch");

    if (p.norm() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
        return -0.5 * es.eigenvalues().minCoeff();
    }
    if (n < 2)
        throw std::invalid_argument("f_operator: nonzero gradient needs dimension >= 2");
    const Eigen::MatrixXd B = orthogonal_basis(p);
    const Eigen::MatrixXd R = B.transpose() * (0.5 * (M + M.transpose())) * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    return -0.5 * es.eigenvalues().minCoeff();
}

// --- Solver domains ----------------------------------------------------------

namespace {

template <int D>
SolverDomain<D> polytope_domain_impl(const geometry::PolytopeK& K,
                                     std::function<double(const Eigen::Matrix<double, D, 1>&)> bval) {
    using Point = Eigen::Matrix<double, D, 1>;
    if (K.dim != D) throw std::invalid_argument("polytope domain: dimension mismatch");
    struct HS {
        Point n;
        double c;
    };
    auto hss = std::make_shared<std::vector<HS>>();
    for (const auto& hs : K.halfspaces) {
        HS h;
        h.n = hs.normal.head<D>();
        h.c = hs.offset;
        hss->push_back(h);
    }
    SolverDomain<D> dom;
    dom.signed_distance = [hss](const Point& x) {
        double sd = std::numeric_limits<double>::infinity();
        for (const auto& h : *hss) sd = std::min(sd, h.c - h.n.dot(x));
        return sd;
    };
    dom.ray_exit = [hss](const Point& x, const Point& dir) {
        double t = std::numeric_limits<double>::infinity();
        for (const auto& h : *hss) {
            const double nd = h.n.dot(dir);
            if (nd > 1e-14) t = std::min(t, (h.c - h.n.dot(x)) / nd);
        }
        return std::max(t, 0.0);
    };
    if (bval)
        dom.boundary_value = std::move(bval);
    else
        dom.boundary_value = [](const Point&) { return 0.0; };
    Point lo = Point::Constant(std::numeric_limits<double>::infinity());
    Point hi = -lo;
    for (int i = 0; i < K.vertices.cols(); ++i) {
        const Point v = K.vertices.col(i).head<D>();
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    dom.lo = lo;
    dom.hi = hi;
    return dom;
}

}  // namespace

SolverDomain<2> polytope_domain2(const geometry::PolytopeK& K,
                                 std::function<double(const Eigen::Vector2d&)> bval) {
    return polytope_domain_impl<2>(K, std::move(bval));
}

SolverDomain<3> polytope_domain3(const geometry::PolytopeK& K,
                                 std::function<double(const Eigen::Vector3d&)> bval) {
    return polytope_domain_impl<3>(K, std::move(bval));
}

SolverDomain<2> disk_domain(double radius) {
    SolverDomain<2> dom;
    dom.signed_distance = [radius](const Eigen::Vector2d& x) { return radius - x.norm(); };
    dom.ray_exit = [radius](const Eigen::Vector2d& x, const Eigen::Vector2d& dir) {
        const double b = x.dot(dir);
        const double c = x.squaredNorm() - radius * radius;
        const double disc = std::max(b * b - c, 0.0);
        return std::max(-b + std::sqrt(disc), 0.0);
    };
    dom.boundary_value = [](const Eigen::Vector2d&) { return 0.0; };
    dom.lo = Eigen::Vector2d(-radius, -radius);
    dom.hi = Eigen::Vector2d(radius, radius);
    return dom;
}

// --- Wide-stencil solver -----------------------------------------------------

namespace {

template <int D>
std::vector<std::array<int, D>> stencil_directions(int radius) {
    std::vector<std::array<int, D>> dirs;
    const int r2 = radius * radius;
    std::array<int, D> e{};
    std::function<void(int)> rec = [&](int axis) {
        if (axis == D) {
            int norm2 = 0;
            int g = 0;
            int first_nonzero = 0;
            bool seen = false;
            for (int d = 0; d < D; ++d) {
                norm2 += e[d] * e[d];
                g = std::gcd(g, std::abs(e[d]));
                if (!seen && e[d] != 0) {
                    first_nonzero = e[d];
                    seen = true;
                }
            }
            if (norm2 == 0 || norm2 > r2) return;
            if (g != 1) return;                // primitive vectors only
            if (first_nonzero < 0) return;     // one representative per +/- pair
            dirs.push_back(e);
            return;
        }
        for (int v = -radius; v <= radius; ++v) {
            e[axis] = v;
            rec(axis + 1);
        }
    };
    rec(0);
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

struct Arm {
    std::int32_t nb = -1;  // grid index of the full-length endpoint, -1 if truncated
    double rho = 0.0;      // arm length
    double bval = 0.0;     // Dirichlet value at the truncated endpoint
};

template <int D>
MinCurvField<D> solve_impl(const SolverDomain<D>& dom, double h, const SolveOptions& opt,
                           const std::vector<double>* initial_guess,
                           const UniformGrid<D>* guess_grid) {
    using Point = Eigen::Matrix<double, D, 1>;

    MinCurvField<D> out;
    UniformGrid<D>& g = out.grid;
    const double margin = 2.0 * h;
    g.h = h;
    for (int d = 0; d < D; ++d) {
        g.origin[d] = dom.lo[d] - margin;
        g.dims[d] = static_cast<int>(std::ceil((dom.hi[d] - dom.lo[d] + 2.0 * margin) / h)) + 1;
    }
    const std::size_t n = g.size();
    g.values.assign(n, 0.0);
    g.inside.assign(n, 0);

    std::array<std::size_t, D> stride{};
    stride[0] = 1;
    for (int d = 1; d < D; ++d) stride[d] = stride[d - 1] * g.dims[d - 1];

    std::vector<std::size_t> interior;
    for (std::size_t k = 0; k < n; ++k) {
        const Point x = g.point(g.coords(k));
        if (dom.signed_distance(x) > 1e-12) {
            g.inside[k] = 1;
            interior.push_back(k);
        }
    }
    if (interior.empty()) throw std::invalid_argument("solve_mincurv: empty interior");

    // Stencil: primitive lattice directions up to the given radius.
    const auto dirs = stencil_directions<D>(opt.stencil_radius);
    const int nd = static_cast<int>(dirs.size());
    std::vector<std::ptrdiff_t> offsets(nd);
    std::vector<double> lens(nd);
    std::vector<Point> unit(nd);
    for (int m = 0; m < nd; ++m) {
        std::ptrdiff_t off = 0;
        double norm2 = 0.0;
        for (int d = 0; d < D; ++d) {
            off += static_cast<std::ptrdiff_t>(dirs[m][d]) * static_cast<std::ptrdiff_t>(stride[d]);
            norm2 += double(dirs[m][d]) * dirs[m][d];
        }
        offsets[m] = off;
        lens[m] = std::sqrt(norm2) * h;
        for (int d = 0; d < D; ++d) unit[m][d] = dirs[m][d] / std::sqrt(norm2);
    }
    const double sin_tol = 1.0 / std::sqrt(1.0 + double(opt.stencil_radius) * opt.stencil_radius) + 1e-12;
    const double g_eps = 5.0 * h;

    // Per-node arm table.  Clean nodes (all endpoints interior) use shared
    // offsets; nodes near the boundary get explicit truncated arms.
    std::vector<std::int32_t> band_slot(n, -1);
    std::vector<Arm> band_arms;  // band node-major, nd*2 arms each
    {
        std::vector<Arm> tmp(2 * nd);
        for (std::size_t k : interior) {
            const auto c = g.coords(k);
            const Point x = g.point(c);
            bool clean = true;
            for (int m = 0; m < nd && clean; ++m) {
                for (int sgn = 0; sgn < 2; ++sgn) {
                    auto cc = c;
                    for (int d = 0; d < D; ++d) cc[d] += (sgn == 0 ? dirs[m][d] : -dirs[m][d]);
                    if (!g.contains(cc) || !g.inside[g.index(cc)]) {
                        clean = false;
                        break;
                    }
                }
            }
            if (clean) continue;
            for (int m = 0; m < nd; ++m) {
                for (int sgn = 0; sgn < 2; ++sgn) {
                    auto cc = c;
                    for (int d = 0; d < D; ++d) cc[d] += (sgn == 0 ? dirs[m][d] : -dirs[m][d]);
                    Arm a;
                    if (g.contains(cc) && g.inside[g.index(cc)]) {
                        a.nb = static_cast<std::int32_t>(g.index(cc));
                        a.rho = lens[m];
                    } else {
                        const Point dir = (sgn == 0 ? unit[m] : Point(-unit[m]));
                        double rho = dom.ray_exit(x, dir);
                        rho = std::clamp(rho, 1e-12, lens[m]);
                        a.nb = -1;
                        a.rho = rho;
                        a.bval = dom.boundary_value(x + rho * dir);
                    }
                    tmp[2 * m + sgn] = a;
                }
            }
            band_slot[k] = static_cast<std::int32_t>(band_arms.size() / (2 * nd));
            band_arms.insert(band_arms.end(), tmp.begin(), tmp.end());
        }
    }

    std::vector<double>& u = g.values;
    if (initial_guess && guess_grid) {
        for (std::size_t k : interior) {
            const Point x = g.point(g.coords(k));
            u[k] = std::max(0.0, guess_grid->interpolate(*initial_guess, x));
        }
    }

    std::vector<double> grad(n * D, 0.0);
    std::vector<std::int16_t> policy(n, 0);

    auto compute_gradients = [&]() {
        for (std::size_t k : interior) {
            const auto c = g.coords(k);
            for (int d = 0; d < D; ++d) {
                auto cm = c, cp = c;
                cm[d] -= 1;
                cp[d] += 1;
                const bool okm = g.contains(cm) && g.inside[g.index(cm)];
                const bool okp = g.contains(cp) && g.inside[g.index(cp)];
                double gd = 0.0;
                if (okm && okp)
                    gd = (u[g.index(cp)] - u[g.index(cm)]) / (2.0 * h);
                else if (okp)
                    gd = (u[g.index(cp)] - u[k]) / h;
                else if (okm)
                    gd = (u[k] - u[g.index(cm)]) / h;
                grad[k * D + d] = gd;
            }
        }
    };

    auto candidate = [&](std::size_t k, int m) -> std::pair<double, double> {
        // Returns (candidate value, rho+ * rho-).
        const std::int32_t slot = band_slot[k];
        if (slot < 0) {
            const double up = u[k + offsets[m]];
            const double um = u[k - offsets[m]];
            const double l2 = lens[m] * lens[m];
            return {0.5 * (up + um) + l2, l2};
        }
        const Arm& ap = band_arms[std::size_t(slot) * 2 * nd + 2 * m];
        const Arm& am = band_arms[std::size_t(slot) * 2 * nd + 2 * m + 1];
        const double vp = ap.nb >= 0 ? u[ap.nb] : ap.bval;
        const double vm = am.nb >= 0 ? u[am.nb] : am.bval;
        const double rp = ap.rho;
        const double rm = am.rho;
        return {(rm * vp + rp * vm) / (rp + rm) + rp * rm, rp * rm};
    };

    auto admissible = [&](std::size_t k, int m, double gnorm) {
        if (gnorm < g_eps) return true;
        double dot = 0.0;
        for (int d = 0; d < D; ++d) dot += unit[m][d] * grad[k * D + d];
        return std::abs(dot) <= sin_tol * gnorm;
    };

    auto gradient_norm = [&](std::size_t k) {
        double s = 0.0;
        for (int d = 0; d < D; ++d) s += grad[k * D + d] * grad[k * D + d];
        return std::sqrt(s);
    };

    double residual = std::numeric_limits<double>::infinity();
    int round = 0;
    bool converged = false;
    for (; round < opt.max_rounds; ++round) {
        compute_gradients();

        // Policy sweep: best admissible direction per node, Gauss-Seidel.
        double change = 0.0;
        for (std::size_t k : interior) {
            const double gn = gradient_norm(k);
            double best = -std::numeric_limits<double>::infinity();
            int bestdir = -1;
            for (int m = 0; m < nd; ++m) {
                if (!admissible(k, m, gn)) continue;
                const double cand = candidate(k, m).first;
                if (cand > best) {
                    best = cand;
                    bestdir = m;
                }
            }
            if (bestdir < 0) {  // fall back to the most orthogonal direction
                double bdot = std::numeric_limits<double>::infinity();
                for (int m = 0; m < nd; ++m) {
                    double dot = 0.0;
                    for (int d = 0; d < D; ++d) dot += unit[m][d] * grad[k * D + d];
                    if (std::abs(dot) < bdot) {
                        bdot = std::abs(dot);
                        bestdir = m;
                    }
                }
                best = candidate(k, bestdir).first;
            }
            policy[k] = static_cast<std::int16_t>(bestdir);
            change = std::max(change, std::abs(best - u[k]));
            u[k] = best;
        }

        // Frozen-policy relaxation, alternating sweep orders.
        for (int sweep = 0; sweep < opt.relax_sweeps; ++sweep) {
            if (sweep % 2 == 0) {
                for (std::size_t idx = 0; idx < interior.size(); ++idx) {
                    const std::size_t k = interior[idx];
                    const double cand = candidate(k, policy[k]).first;
                    change = std::max(change, std::abs(cand - u[k]));
                    u[k] = cand;
                }
            } else {
                for (std::size_t idx = interior.size(); idx-- > 0;) {
                    const std::size_t k = interior[idx];
                    const double cand = candidate(k, policy[k]).first;
                    change = std::max(change, std::abs(cand - u[k]));
                    u[k] = cand;
                }
            }
        }

        // Residual of the full operator with fresh gradients.
        compute_gradients();
        residual = 0.0;
        for (std::size_t k : interior) {
            const double gn = gradient_norm(k);
            double m_best = -std::numeric_limits<double>::infinity();
            for (int m = 0; m < nd; ++m) {
                if (!admissible(k, m, gn)) continue;
                const auto [cand, rho2] = candidate(k, m);
                m_best = std::max(m_best, (cand - u[k]) / rho2);
            }
            if (std::isfinite(m_best)) residual = std::max(residual, std::abs(m_best));
        }
        out.residual_history.push_back(residual);

        if (change < opt.change_tol && residual < opt.residual_tol) {
            converged = true;
            ++round;
            break;
        }
    }

    if (!converged) {
        std::ostringstream msg;
        msg << "solve_mincurv: no convergence after " << round
            << " rounds; residual history tail:";
        const std::size_t tail = std::min<std::size_t>(8, out.residual_history.size());
        for (std::size_t i = out.residual_history.size() - tail; i < out.residual_history.size();
             ++i)
            msg << " " << out.residual_history[i];
        throw std::runtime_error(msg.str());
    }

    out.rounds = round;
    out.converged = converged;
    out.residual = residual;
    out.max_value = 0.0;
    for (std::size_t k : interior) {
        if (u[k] > out.max_value) {
            out.max_value = u[k];
            out.argmax = g.point(g.coords(k));
        }
    }
    return out;
}

template <int D>
MinCurvField<D> solve_cascadic(const SolverDomain<D>& dom, double h, const SolveOptions& opt) {
    if (!opt.cascadic) return solve_impl<D>(dom, h, opt, nullptr, nullptr);
    // Shrink the box span to estimate a safe coarsest level.
    double span = 0.0;
    for (int d = 0; d < D; ++d) span = std::max(span, dom.hi[d] - dom.lo[d]);
    std::vector<double> levels{h};
    while (levels.back() * 2.0 < span / 12.0) levels.push_back(levels.back() * 2.0);
    std::reverse(levels.begin(), levels.end());

    MinCurvField<D> field;
    bool have = false;
    for (double hl : levels) {
        SolveOptions lopt = opt;
        lopt.cascadic = false;
        if (hl != h) lopt.residual_tol = std::max(opt.residual_tol, 1e-3);
        if (!have) {
            field = solve_impl<D>(dom, hl, lopt, nullptr, nullptr);
            have = true;
        } else {
            field = solve_impl<D>(dom, hl, lopt, &field.grid.values, &field.grid);
        }
    }
    return field;
}

}  // namespace

MinCurvField<2> solve_grid2(const SolverDomain<2>& dom, double h, const SolveOptions& opt) {
    return solve_cascadic<2>(dom, h, opt);
}

MinCurvField<3> solve_grid3(const SolverDomain<3>& dom, double h, const SolveOptions& opt) {
    return solve_cascadic<3>(dom, h, opt);
}

SimplexSolution solve_mincurv(int d, double h, const SimplexSolveOptions& opt) {
    if (d != 3 && d != 4)
        throw std::invalid_argument("solve_mincurv: grid solver supports d = 3 or d = 4");
    SimplexSolution sol;
    sol.d = d;

    const auto U3 = geometry::build_isometry(3);
    const auto K3 = geometry::simplex_polytope(U3);

    if (d == 3) {
        auto dom = polytope_domain2(K3);
        sol.field2 = std::make_shared<MinCurvField<2>>(solve_grid2(dom, h, opt.base));
        sol.max_value = sol.field2->max_value;
        sol.residual = sol.field2->residual;
        return sol;
    }

    // Facet data: one shared d = 3 solve; all four faces of the chart
    // polytope are congruent copies of K3.
    double hf = opt.facet_h;
    if (hf <= 0.0) hf = K3.inradius() / 48.0;
    SolveOptions fopt = opt.base;
    fopt.stencil_radius = std::max(3, opt.base.stencil_radius);
    auto fdom = polytope_domain2(K3);
    sol.facet = std::make_shared<MinCurvField<2>>(solve_grid2(fdom, hf, fopt));

    const auto U4 = geometry::build_isometry(4);
    const auto K4 = geometry::simplex_polytope(U4);
    auto facet_field = sol.facet;
    auto bval = [U4, U3, facet_field](const Eigen::Vector3d& xb) {
        const Eigen::VectorXd y = geometry::lift(U4, xb);
        int drop = 0;
        for (int i = 1; i < 4; ++i)
            if (y[i] < y[drop]) drop = i;
        Eigen::VectorXd sub(3);
        int j = 0;
        for (int i = 0; i < 4; ++i)
            if (i != drop) sub[j++] = y[i];
        sub.array() += (1.0 - sub.sum()) / 3.0;  // project onto the facet hull
        const Eigen::VectorXd q = U3.matrix * sub;
        return std::max(0.0, facet_field->grid.interpolate(Eigen::Vector2d(q[0], q[1])));
    };
    auto dom = polytope_domain3(K4, bval);
    sol.field3 = std::make_shared<MinCurvField<3>>(solve_grid3(dom, h, opt.base));
    sol.max_value = sol.field3->max_value;
    sol.residual = sol.field3->residual;
    return sol;
}

}  // namespace curvarb::mincurv
