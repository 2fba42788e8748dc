#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace curvarb {

// Uniform lattice over an axis-aligned box, row-major with the first axis
// fastest.  Holds one scalar per node plus an inside-domain mask.
template <int D>
struct UniformGrid {
    static_assert(D == 1 || D == 2 || D == 3);
    using Point = Eigen::Matrix<double, D, 1>;

    Point origin = Point::Zero();
    double h = 0.0;
    std::array<int, D> dims{};
    std::vector<double> values;
    std::vector<std::uint8_t> inside;

    std::size_t size() const {
        std::size_t n = 1;
        for (int d = 0; d < D; ++d) n *= static_cast<std::size_t>(dims[d]);
        return n;
    }

    std::size_t index(const std::array<int, D>& c) const {
        std::size_t idx = 0;
        for (int d = D - 1; d >= 0; --d) idx = idx * dims[d] + c[d];
        return idx;
    }

    std::array<int, D> coords(std::size_t idx) const {
        std::array<int, D> c{};
        for (int d = 0; d < D; ++d) {
            c[d] = static_cast<int>(idx % dims[d]);
            idx /= dims[d];
        }
        return c;
    }

    Point point(const std::array<int, D>& c) const {
        Point p = origin;
        for (int d = 0; d < D; ++d) p[d] += h * c[d];
        return p;
    }

    bool contains(const std::array<int, D>& c) const {
        for (int d = 0; d < D; ++d)
            if (c[d] < 0 || c[d] >= dims[d]) return false;
        return true;
    }

    // Multilinear interpolation of `field` (any node array of grid size).
    double interpolate(const std::vector<double>& field, const Point& x) const {
        std::array<int, D> base{};
        std::array<double, D> frac{};
        for (int d = 0; d < D; ++d) {
            const double s = (x[d] - origin[d]) / h;
            int b = static_cast<int>(std::floor(s));
            b = std::max(0, std::min(b, dims[d] - 2));
            base[d] = b;
            frac[d] = std::max(0.0, std::min(1.0, s - b));
        }
        double acc = 0.0;
        const int corners = 1 << D;
        for (int m = 0; m < corners; ++m) {
            std::array<int, D> c = base;
            double wgt = 1.0;
            for (int d = 0; d < D; ++d) {
                if (m & (1 << d)) {
                    c[d] += 1;
                    wgt *= frac[d];
                } else {
                    wgt *= 1.0 - frac[d];
                }
            }
            acc += wgt * field[index(c)];
        }
        return acc;
    }

    double interpolate(const Point& x) const { return interpolate(values, x); }
};

using Grid2 = UniformGrid<2>;
using Grid3 = UniformGrid<3>;

}  // namespace curvarb
