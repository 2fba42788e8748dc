#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "curvarb/geometry.hpp"

using namespace curvarb;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd random_simplex_point(std::mt19937_64& rng, int d) {
    std::exponential_distribution<double> expo(1.0);
    VectorXd y(d);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        y[i] = expo(rng);
        s += y[i];
    }
    return y / s;
}

}  // namespace

TEST_CASE("chart matrix for d=3 matches the closed-form rows up to sign") {
    const auto U = geometry::build_isometry(3);
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s6 = 1.0 / std::sqrt(6.0);
    MatrixXd expected(2, 3);
    expected << s2, -s2, 0.0, s6, s6, -2.0 * s6;
    for (int r = 0; r < 2; ++r) {
        const double same = (U.matrix.row(r) - expected.row(r)).norm();
        const double flip = (U.matrix.row(r) + expected.row(r)).norm();
        CHECK(std::min(same, flip) < 1e-12);
    }
}

TEST_CASE("chart for d=2 is the unit vector orthogonal to ones") {
    const auto U = geometry::build_isometry(2);
    REQUIRE(U.matrix.rows() == 1);
    const double s2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(U.matrix(0, 0)) - s2) < 1e-14);
    CHECK(std::abs(U.matrix(0, 0) + U.matrix(0, 1)) < 1e-14);
}

TEST_CASE("chart invariants for d=2..6") {
    for (int d = 2; d <= 6; ++d) {
        const auto U = geometry::build_isometry(d);
        const MatrixXd gram = U.matrix * U.matrix.transpose();
        CHECK((gram - MatrixXd::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((U.matrix * VectorXd::Ones(d)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("invalid dimension is rejected") {
    CHECK_THROWS_AS(geometry::build_isometry(1), std::invalid_argument);
    CHECK_THROWS_AS(geometry::facet_lattice(1), std::invalid_argument);
}

TEST_CASE("projection geometry of the d=3 chart") {
    const auto U = geometry::build_isometry(3);
    const VectorXd bary = VectorXd::Constant(3, 1.0 / 3.0);
    CHECK(geometry::project(U, bary).norm() < 1e-14);

    VectorXd e1 = VectorXd::Zero(3);
    e1[0] = 1.0;
    CHECK(geometry::project(U, e1).norm() == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));

    // Pairwise distances of projected vertices stay sqrt(2).
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            VectorXd a = VectorXd::Zero(3), b = VectorXd::Zero(3);
            a[i] = 1.0;
            b[j] = 1.0;
            const double dist =
                (geometry::project(U, a) - geometry::project(U, b)).norm();
            CHECK(dist == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("lift inverts project on the hyperplane") {
    std::mt19937_64 rng(7);
    for (int d = 2; d <= 5; ++d) {
        const auto U = geometry::build_isometry(d);
        for (int rep = 0; rep < 50; ++rep) {
            const VectorXd y = random_simplex_point(rng, d);
            const VectorXd back = geometry::lift(U, geometry::project(U, y));
            CHECK((back - y).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("projection preserves distances between simplex points") {
    std::mt19937_64 rng(11);
    for (int d = 3; d <= 5; ++d) {
        const auto U = geometry::build_isometry(d);
        for (int rep = 0; rep < 50; ++rep) {
            const VectorXd a = random_simplex_point(rng, d);
            const VectorXd b = random_simplex_point(rng, d);
            const double da = (a - b).norm();
            const double db = (geometry::project(U, a) - geometry::project(U, b)).norm();
            CHECK(std::abs(da - db) < 1e-10);
        }
    }
}

TEST_CASE("polytope K for d=3: inradius, vertex distance, centroid, area") {
    const auto U = geometry::build_isometry(3);
    const auto K = geometry::simplex_polytope(U);
    CHECK(geometry::signed_boundary_distance(K, Eigen::Vector2d::Zero()) ==
          doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(K.inradius() == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));

    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(geometry::signed_boundary_distance(K, K.vertices.col(i))) < 1e-12);
    CHECK(K.vertices.rowwise().mean().cwiseAbs().maxCoeff() < 1e-12);

    // Shoelace area of the projected triangle equals sqrt(3)/2.
    double area = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto a = K.vertices.col(i);
        const auto b = K.vertices.col((i + 1) % 3);
        area += a.x() * b.y() - b.x() * a.y();
    }
    area = std::abs(area) / 2.0;
    CHECK(area == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-10));
}

TEST_CASE("every vertex satisfies every halfspace") {
    for (int d = 2; d <= 5; ++d) {
        const auto K = geometry::simplex_polytope(geometry::build_isometry(d));
        for (int i = 0; i < K.vertices.cols(); ++i)
            for (const auto& hs : K.halfspaces)
                CHECK(hs.normal.dot(K.vertices.col(i)) <= hs.offset + 1e-12);
    }
}

TEST_CASE("signed distance sign agrees with barycentric membership") {
    // Independent route: a chart point is in K iff its lift has nonnegative
    // coordinates.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> box(-1.2, 1.2);
    for (int d = 3; d <= 4; ++d) {
        const auto U = geometry::build_isometry(d);
        const auto K = geometry::simplex_polytope(U);
        for (int rep = 0; rep < 500; ++rep) {
            VectorXd x(d - 1);
            for (int i = 0; i < d - 1; ++i) x[i] = box(rng);
            const double sd = geometry::signed_boundary_distance(K, x);
            const VectorXd y = geometry::lift(U, x);
            const bool inside_hull = y.minCoeff() >= 0.0;
            if (std::abs(sd) > 1e-9) CHECK(inside_hull == (sd > 0.0));
        }
    }
}

TEST_CASE("interior iff strictly positive weights") {
    std::mt19937_64 rng(29);
    const auto U = geometry::build_isometry(3);
    const auto K = geometry::simplex_polytope(U);
    for (int rep = 0; rep < 200; ++rep) {
        const VectorXd y = random_simplex_point(rng, 3);
        const double sd = geometry::signed_boundary_distance(K, geometry::project(U, y));
        CHECK((y.minCoeff() > 1e-12) == (sd > 1e-12));
    }
}

TEST_CASE("facet lattice counts") {
    CHECK(geometry::facet_lattice(3).size() == 3);   // edges only
    const auto f4 = geometry::facet_lattice(4);
    CHECK(f4.size() == 10);  // 6 edges + 4 triangles
    int edges = 0, tris = 0;
    for (const auto& f : f4) {
        if (f.vertex_indices.size() == 2) ++edges;
        if (f.vertex_indices.size() == 3) ++tris;
    }
    CHECK(edges == 6);
    CHECK(tris == 4);
}

TEST_CASE("facet charts satisfy the chart invariants") {
    for (const auto& f : geometry::facet_lattice(5)) {
        const int k = static_cast<int>(f.vertex_indices.size());
        const auto& m = f.affine_chart.matrix;
        CHECK((m * m.transpose() - MatrixXd::Identity(k - 1, k - 1)).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK((m * VectorXd::Ones(k)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("facet chart mapping is an isometry onto the facet sub-simplex") {
    // A point on a tetrahedron face maps to the face's own triangle chart
    // with distances preserved.
    const auto U = geometry::build_isometry(4);
    const auto faces = geometry::facet_lattice(4);
    std::mt19937_64 rng(31);
    for (const auto& f : faces) {
        if (f.vertex_indices.size() != 3) continue;
        for (int rep = 0; rep < 20; ++rep) {
            VectorXd ya = VectorXd::Zero(4), yb = VectorXd::Zero(4);
            VectorXd wa = random_simplex_point(rng, 3);
            VectorXd wb = random_simplex_point(rng, 3);
            for (int i = 0; i < 3; ++i) {
                ya[f.vertex_indices[i]] = wa[i];
                yb[f.vertex_indices[i]] = wb[i];
            }
            const VectorXd qa = geometry::facet_chart_point(U, f, geometry::project(U, ya));
            const VectorXd qb = geometry::facet_chart_point(U, f, geometry::project(U, yb));
            CHECK(std::abs((qa - qb).norm() - (ya - yb).norm()) < 1e-10);
        }
    }
}
