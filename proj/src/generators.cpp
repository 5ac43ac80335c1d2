#include "rbk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace rbk {

namespace {

Vector gaussian_vector(std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal;
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    return v;
}

/// Gaussian rows scaled to the requested norms; zero draws are redrawn.
DenseMatrix gaussian_rows(std::size_t n, std::size_t d, Rng& rng,
                          const std::function<double(std::size_t)>& row_norm) {
    std::normal_distribution<double> normal;
    DenseMatrix a(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = a.values().row(static_cast<Eigen::Index>(i));
        double norm = 0.0;
        do {
            for (Eigen::Index j = 0; j < row.size(); ++j) row(j) = normal(rng);
            norm = row.norm();
        } while (!(norm > 0.0));
        row *= row_norm(i) / norm;
    }
    return a;
}

void require_tall(std::size_t n, std::size_t d, const char* what) {
    if (d == 0 || n <= d) {
        throw std::invalid_argument(std::string(what) + ": need n > d >= 1");
    }
}

/// b = A x* + e with e orthogonal to range(A) and ||e|| = residual_norm.
LinearSystem with_orthogonal_noise(DenseMatrix a, double residual_norm, Rng& rng) {
    if (!(residual_norm > 0.0)) {
        throw std::invalid_argument("inconsistent system needs residual_norm > 0");
    }
    const std::size_t n = a.rows();
    const SvdFactorization f = svd(a);
    const Vector x_star = gaussian_vector(a.cols(), rng);
    Vector e;
    for (;;) {
        const Vector g = gaussian_vector(n, rng);
        e = g - mat_vec(a, pinv_apply(f, g));
        // Re-project once: a single projection leaves O(eps * ||g||) range
        // content, which matters after rescaling when ||e|| << ||g||.
        e -= mat_vec(a, pinv_apply(f, e));
        if (e.norm() > 1e-8 * g.norm()) break;
    }
    e *= residual_norm / e.norm();
    Vector b = mat_vec(a, x_star) + e;
    return make_system(std::move(a), std::move(b));
}

}  // namespace

LinearSystem gen_gaussian_rowstd(std::size_t n, std::size_t d, Rng& rng) {
    require_tall(n, d, "gen_gaussian_rowstd");
    DenseMatrix a = gaussian_rows(n, d, rng, [](std::size_t) { return 1.0; });
    const Vector x = gaussian_vector(d, rng);
    Vector b = mat_vec(a, x);
    return make_system(std::move(a), std::move(b));
}

LinearSystem gen_inconsistent(std::size_t n, std::size_t d, double residual_norm, Rng& rng) {
    require_tall(n, d, "gen_inconsistent");
    DenseMatrix a = gaussian_rows(n, d, rng, [](std::size_t) { return 1.0; });
    return with_orthogonal_noise(std::move(a), residual_norm, rng);
}

LinearSystem gen_dynamic_rows(std::size_t n, std::size_t d, double residual_norm, Rng& rng) {
    require_tall(n, d, "gen_dynamic_rows");
    DenseMatrix a = gaussian_rows(n, d, rng, [](std::size_t i) { return static_cast<double>(i + 1); });
    return with_orthogonal_noise(std::move(a), residual_norm, rng);
}

Vector ray_intersections(std::size_t grid, Point2 p0, Point2 p1) {
    if (grid == 0) throw std::invalid_argument("ray_intersections: empty grid");
    const double n = static_cast<double>(grid);
    Vector row = Vector::Zero(static_cast<Eigen::Index>(grid * grid));
    const double dx = p1.x - p0.x;
    const double dy = p1.y - p0.y;
    const double length = std::hypot(dx, dy);
    if (length == 0.0) return row;

    // Parameters where the segment crosses a grid line, plus its endpoints.
    std::vector<double> ts{0.0, 1.0};
    for (std::size_t k = 0; k <= grid; ++k) {
        const double g = static_cast<double>(k);
        if (dx != 0.0) {
            const double t = (g - p0.x) / dx;
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
        if (dy != 0.0) {
            const double t = (g - p0.y) / dy;
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double t0 = ts[k];
        const double t1 = ts[k + 1];
        if (t1 - t0 <= 1e-15) continue;
        const double tm = 0.5 * (t0 + t1);
        const double mx = p0.x + tm * dx;
        const double my = p0.y + tm * dy;
        if (mx <= 0.0 || mx >= n || my <= 0.0 || my >= n) continue;
        // A segment running exactly along a grid line borders two pixels and
        // belongs to neither interior; skip it.
        if ((dx == 0.0 && mx == std::floor(mx)) || (dy == 0.0 && my == std::floor(my))) continue;
        const auto c = static_cast<std::size_t>(std::floor(mx));
        const auto r = static_cast<std::size_t>(std::floor(my));
        row(static_cast<Eigen::Index>(r * grid + c)) += (t1 - t0) * length;
    }
    return row;
}

Vector tomography_phantom(std::size_t grid) {
    const double n = static_cast<double>(grid);
    const double centre = 0.5 * n;
    const double width = 0.25 * n;
    Vector x(static_cast<Eigen::Index>(grid * grid));
    for (std::size_t r = 0; r < grid; ++r) {
        for (std::size_t c = 0; c < grid; ++c) {
            const double px = static_cast<double>(c) + 0.5 - centre;
            const double py = static_cast<double>(r) + 0.5 - centre;
            x(static_cast<Eigen::Index>(r * grid + c)) =
                std::exp(-(px * px + py * py) / (2.0 * width * width));
        }
    }
    return x / x.maxCoeff();
}

LinearSystem gen_tomography(std::size_t grid, std::size_t oversampling, Rng& rng) {
    if (grid < 2 || oversampling < 1) {
        throw std::invalid_argument("gen_tomography: need N >= 2 and f >= 1");
    }
    const double n = static_cast<double>(grid);
    const std::size_t rows = oversampling * grid * grid;
    const std::size_t cols = grid * grid;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> side(0, 3);
    auto point_on = [&](int s) {
        const double u = n * unit(rng);
        switch (s) {
            case 0: return Point2{u, 0.0};  // bottom
            case 1: return Point2{n, u};    // right
            case 2: return Point2{u, n};    // top
            default: return Point2{0.0, u}; // left
        }
    };
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        Vector row;
        do {
            const int s0 = side(rng);
            int s1 = side(rng);
            while (s1 == s0) s1 = side(rng);
            const Point2 p0 = point_on(s0);
            const Point2 p1 = point_on(s1);
            row = ray_intersections(grid, p0, p1);
        } while (!(row.squaredNorm() > 0.0));
        a.values().row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    Vector b = mat_vec(a, tomography_phantom(grid));
    return make_system(std::move(a), std::move(b));
}

LinearSystem generate(const ProblemSpec& spec) {
    Rng rng(derive_seed(spec.seed, "problem"));
    switch (spec.kind) {
        case ProblemKind::GaussianRowStd:
            return gen_gaussian_rowstd(spec.n, spec.d, rng);
        case ProblemKind::GaussianInconsistent:
            return gen_inconsistent(spec.n, spec.d, spec.residual_norm, rng);
        case ProblemKind::GaussianDynamicRows:
            return gen_dynamic_rows(spec.n, spec.d, spec.residual_norm, rng);
        case ProblemKind::Tomography:
            return gen_tomography(spec.tomo_grid, spec.tomo_oversampling, rng);
    }
    throw std::invalid_argument("generate: unknown problem kind");
}

}  // namespace rbk
