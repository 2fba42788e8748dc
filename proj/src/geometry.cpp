#include "curvarb/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace curvarb::geometry {

bool is_simplex_point(const Eigen::VectorXd& y, double tol) {
    if (y.size() < 1) return false;
    if (y.minCoeff() < -tol) return false;
    return std::abs(y.sum() - 1.0) <= tol;
}

double PolytopeK::inradius() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& hs : halfspaces) r = std::min(r, hs.offset);
    return r;
}

IsometryMap build_isometry(int d) {
    if (d < 2) throw std::invalid_argument("build_isometry: need d >= 2");
    // Gram-Schmidt on the difference basis e_i - e_{i+1} of {x : x.1 = 0}.
    // For d = 3 this reproduces the rows (1/sqrt2, -1/sqrt2, 0) and
    // (1/sqrt6, 1/sqrt6, -2/sqrt6).
    Eigen::MatrixXd U(d - 1, d);
    for (int i = 0; i < d - 1; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        v[i] = 1.0;
        v[i + 1] = -1.0;
        for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize once
            for (int j = 0; j < i; ++j) v -= U.row(j).dot(v) * U.row(j).transpose();
        }
        U.row(i) = v / v.norm();
    }
    IsometryMap map;
    map.matrix = U;
    map.offset = Eigen::VectorXd::Constant(d, 1.0 / d);
    return map;
}

Eigen::VectorXd project(const IsometryMap& U, const Eigen::VectorXd& y) {
    return U.matrix * (y - U.offset);
}

Eigen::VectorXd lift(const IsometryMap& U, const Eigen::VectorXd& x) {
    return U.matrix.transpose() * x + U.offset;
}

PolytopeK simplex_polytope(const IsometryMap& U) {
    const int d = U.d();
    PolytopeK K;
    K.dim = U.dim();
    // Vertex images: project(e_i) = U e_i = i-th column of the chart matrix.
    K.vertices = U.matrix;
    // Constraint y_i >= 0 in chart coordinates reads -u_i . x <= 1/d where
    // u_i is the i-th column; |u_i| = sqrt((d-1)/d).
    const double colnorm = std::sqrt((d - 1.0) / d);
    K.halfspaces.reserve(d);
    for (int i = 0; i < d; ++i) {
        Halfspace hs;
        hs.normal = -U.matrix.col(i) / colnorm;
        hs.offset = 1.0 / (d * colnorm);
        K.halfspaces.push_back(std::move(hs));
    }
    return K;
}

double signed_boundary_distance(const PolytopeK& K, const Eigen::VectorXd& x) {
    double sd = std::numeric_limits<double>::infinity();
    for (const auto& hs : K.halfspaces) sd = std::min(sd, hs.offset - hs.normal.dot(x));
    return sd;
}

std::vector<Facet> facet_lattice(int d) {
    if (d < 2) throw std::invalid_argument("facet_lattice: need d >= 2");
    std::vector<Facet> out;
    // Enumerate vertex subsets of size 2 .. d-1 in lexicographic order.
    for (int k = 2; k <= d - 1; ++k) {
        std::vector<int> pick(k);
        for (int i = 0; i < k; ++i) pick[i] = i;
        while (true) {
            Facet f;
            f.vertex_indices = pick;
            f.affine_chart = build_isometry(k);
            out.push_back(std::move(f));
            int i = k - 1;
            while (i >= 0 && pick[i] == d - k + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return out;
}

Eigen::VectorXd facet_chart_point(const IsometryMap& U, const Facet& f,
                                  const Eigen::VectorXd& x) {
    const Eigen::VectorXd y = lift(U, x);
    const int k = static_cast<int>(f.vertex_indices.size());
    Eigen::VectorXd sub(k);
    for (int i = 0; i < k; ++i) sub[i] = y[f.vertex_indices[i]];
    // Orthogonal projection onto the facet's affine hull: drop the missing
    // coordinates, then restore the unit sum.
    sub.array() += (1.0 - sub.sum()) / k;
    return project(f.affine_chart, sub);
}

}  // namespace curvarb::geometry
