#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace curvarb::geometry {

// Point on the unit simplex: nonnegative weights summing to one.
struct SimplexPoint {
    Eigen::VectorXd coords;

    int d() const { return static_cast<int>(coords.size()); }
};

bool is_simplex_point(const Eigen::VectorXd& y, double tol = 1e-12);

// Affine isometric chart between the simplex hyperplane {sum = 1} in R^d and
// R^{d-1}.  Rows of `matrix` are orthonormal and annihilate the ones vector;
// `offset` is the barycenter, so the chart is centered at the origin.
struct IsometryMap {
    Eigen::MatrixXd matrix;   // (d-1) x d
    Eigen::VectorXd offset;   // barycenter (1/d, ..., 1/d)

    int d() const { return static_cast<int>(matrix.cols()); }
    int dim() const { return static_cast<int>(matrix.rows()); }
};

// Half-space n.x <= c with |n| = 1.
struct Halfspace {
    Eigen::VectorXd normal;
    double offset = 0.0;
};

// Projected polytope K = U(simplex) in R^{d-1}: vertex list plus unit-normal
// half-space description.
struct PolytopeK {
    int dim = 0;
    Eigen::MatrixXd vertices;           // dim x nverts, columns are vertices
    std::vector<Halfspace> halfspaces;

    double inradius() const;            // distance from origin to nearest face
};

// Proper face of the simplex: vertex subset with its own lower-dimensional
// chart.
struct Facet {
    std::vector<int> vertex_indices;    // indices into {0, ..., d-1}
    IsometryMap affine_chart;           // chart of the k-vertex sub-simplex
};

// Deterministic Gram-Schmidt chart; throws std::invalid_argument for d < 2.
IsometryMap build_isometry(int d);

Eigen::VectorXd project(const IsometryMap& U, const Eigen::VectorXd& y);
Eigen::VectorXd lift(const IsometryMap& U, const Eigen::VectorXd& x);

// K = U(simplex): vertices are the images of the simplex vertices.
PolytopeK simplex_polytope(const IsometryMap& U);

// Positive inside, negative outside, zero on the boundary.
double signed_boundary_distance(const PolytopeK& K, const Eigen::VectorXd& x);

// All proper faces (vertex subsets of size 2 .. d-1), each with its chart.
std::vector<Facet> facet_lattice(int d);

// Chart coordinates of a point of K on (or near) the affine hull of a facet:
// lift to the simplex, orthogonally project onto the facet's hull, re-chart.
Eigen::VectorXd facet_chart_point(const IsometryMap& U, const Facet& f,
                                  const Eigen::VectorXd& x);

}  // namespace curvarb::geometry
