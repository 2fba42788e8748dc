#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvarb/geometry.hpp"
#include "curvarb/grid.hpp"

namespace curvarb::mincurv {

// Minimum-curvature operator: infimum of -(1/2) tr(aM) over unit-trace PSD
// controls a annihilating p.  Closed form: the extreme points are rank-one
// projectors onto unit vectors orthogonal to p, so the value is -(1/2) times
// the smallest eigenvalue of M restricted to p-perp (all of R^n when p = 0).
// Throws std::invalid_argument for nonsymmetric M.
double f_operator(const Eigen::VectorXd& p, const Eigen::MatrixXd& M, double sym_tol = 1e-12);

// Orthonormal basis of the hyperplane orthogonal to p (n x (n-1) columns).
Eigen::MatrixXd orthogonal_basis(const Eigen::VectorXd& p);

// Convex solver domain in dimension 2 or 3: polytope or ball, with Dirichlet
// data prescribed on the boundary (zero, or recursive facet fields).
template <int D>
struct SolverDomain {
    using Point = Eigen::Matrix<double, D, 1>;
    std::function<double(const Point&)> signed_distance;           // > 0 inside
    std::function<double(const Point&, const Point&)> ray_exit;    // distance to boundary along unit dir
    std::function<double(const Point&)> boundary_value;            // Dirichlet data on the boundary
    Point lo, hi;                                                  // bounding box
};

SolverDomain<2> polytope_domain2(const geometry::PolytopeK& K,
                                 std::function<double(const Eigen::Vector2d&)> bval = {});
SolverDomain<3> polytope_domain3(const geometry::PolytopeK& K,
                                 std::function<double(const Eigen::Vector3d&)> bval = {});
SolverDomain<2> disk_domain(double radius);

struct SolveOptions {
    int stencil_radius = 3;
    double residual_tol = 1e-3;
    double change_tol = 1e-6;
    int max_rounds = 6000;
    int relax_sweeps = 20;      // frozen-policy Gauss-Seidel sweeps per round
    bool cascadic = true;       // coarse-to-fine initialization
};

template <int D>
struct MinCurvField {
    UniformGrid<D> grid;                   // values = u on interior nodes, 0 elsewhere
    double max_value = 0.0;
    Eigen::Matrix<double, D, 1> argmax;
    double residual = 0.0;                 // final sup-norm residual |F_h(u) - 1|
    int rounds = 0;
    bool converged = false;
    std::vector<double> residual_history;
};

// Wide-stencil monotone scheme for F(grad u, hess u) = 1 with the prescribed
// boundary data; throws std::runtime_error with the residual history on
// nonconvergence.
MinCurvField<2> solve_grid2(const SolverDomain<2>& dom, double h, const SolveOptions& opt = {});
MinCurvField<3> solve_grid3(const SolverDomain<3>& dom, double h, const SolveOptions& opt = {});

// Full solve for the chart polytope of the d-asset simplex (d = 3 or 4).
// For d = 4 the facet Dirichlet data is the d = 3 solution on each
// (congruent) triangular face, solved first on its own chart grid.
struct SimplexSolution {
    int d = 0;
    std::shared_ptr<MinCurvField<2>> facet;  // d = 4 only: shared facet field
    std::shared_ptr<MinCurvField<2>> field2; // d = 3 result
    std::shared_ptr<MinCurvField<3>> field3; // d = 4 result
    double max_value = 0.0;
    double residual = 0.0;
};

struct SimplexSolveOptions {
    SolveOptions base;
    double facet_h = 0.0;  // grid spacing of the facet solve; 0 = auto
};

SimplexSolution solve_mincurv(int d, double h, const SimplexSolveOptions& opt = {});

// --- Certificates -----------------------------------------------------------

// Smooth candidate with analytic derivatives.
struct Candidate {
    std::string id;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

Candidate quadratic_candidate(int dim);
Candidate inscribed_ball_candidate(int dim, double inradius);

struct PolyTerm {
    double coeff = 0.0;
    std::vector<int> exponents;
};
Candidate polynomial_candidate(int dim, const std::vector<PolyTerm>& terms);

// Candidate backed by a solved grid field; derivatives by central differences.
template <int D>
Candidate grid_candidate(std::shared_ptr<const MinCurvField<D>> field);

enum class Verdict { SubsolutionEvidence, SupersolutionEvidence, Neither };

struct CertificateReport {
    std::string candidate_id;
    double residual_min = 0.0;
    double residual_max = 0.0;
    Verdict verdict = Verdict::Neither;
    double bound_value = 0.0;          // max of the candidate over K
    bool boundary_admissible = false;  // ~0 on vertices and edges, >= 0 on K
    int samples = 0;
    std::vector<double> residuals;     // per-sample, for histograms
};

std::string verdict_name(Verdict v);

// Evaluates F(grad w, hess w) at quasi-random interior points of K.
// Sub-evidence requires residuals <= 1 + tol plus an admissible boundary
// trace and yields the lower bound max w; super-evidence requires residuals
// >= 1 - tol and yields the upper bound max w.
CertificateReport check_certificate(const Candidate& cand, const geometry::PolytopeK& K,
                                    int samples, double tol = 1e-6);

}  // namespace curvarb::mincurv
