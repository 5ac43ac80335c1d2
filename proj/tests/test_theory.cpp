#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rbk/harness.hpp"
#include "rbk/theory.hpp"

#include <cmath>
#include <stdexcept>

using namespace rbk;
using doctest::Approx;

namespace {

PavingParams measured(const DenseMatrix& a, std::size_t blocks, Axis axis, std::uint64_t seed) {
    Rng rng(seed);
    return paving_bounds(a, random_partition(axis == Axis::Rows ? a.rows() : a.cols(), blocks, rng, axis));
}

}  // namespace

TEST_CASE("rate constants") {
    SUBCASE("identity with two blocks") {
        const LinearSystem sys = make_system(DenseMatrix::identity(4), make_vector({1, 2, 3, 4}));
        const PavingParams pp = measured(sys.a, 2, Axis::Rows, 1);
        CHECK(pp.beta == Approx(1.0));
        const RateConstants c = rate_constants(sys, pp, measured(sys.a, 2, Axis::Columns, 2));
        CHECK(c.gamma_row == Approx(0.5));
        CHECK(c.gamma_col == Approx(0.5));
    }
    SUBCASE("single block with orthonormal rows") {
        const LinearSystem sys = make_system(DenseMatrix::identity(3), make_vector({1, 0, 0}));
        const RateConstants c =
            rate_constants(sys, measured(sys.a, 1, Axis::Rows, 1), measured(sys.a, 1, Axis::Columns, 1));
        CHECK(c.gamma_row == Approx(0.0));
    }
    SUBCASE("measured on the row-normalized Gaussian") {
        Rng rng(3);
        const LinearSystem sys = gen_inconsistent(300, 100, 0.5, rng);
        const PavingParams rows = measured(sys.a, 30, Axis::Rows, 4);
        const PavingParams cols = measured(sys.a, 10, Axis::Columns, 5);
        const RateConstants c = rate_constants(sys, rows, cols);
        const double s2 = sys.spectral.sigma_min_nonzero * sys.spectral.sigma_min_nonzero;
        CHECK(c.gamma_row > 0.0);
        CHECK(c.gamma_row < 1.0);
        CHECK(c.gamma_row == Approx(1.0 - s2 / (30.0 * rows.beta)));
        CHECK(c.gamma_col == Approx(1.0 - s2 / (10.0 * cols.beta)));
        CHECK(c.alpha_row == rows.alpha);
        CHECK(c.b_range_norm * c.b_range_norm + c.b_perp_norm * c.b_perp_norm ==
              Approx(sys.b.squaredNorm()).epsilon(1e-10));
        CHECK(c.b_perp_norm == Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("lemma recursion bound") {
    CHECK(lemma_recursion_bound(5, 0.5, 0.3, 0.0, 2.0) == Approx(2.0 * std::pow(0.5, 5)));
    CHECK(lemma_recursion_bound(1, 0.4, 0.7, 3.0, 2.0) == Approx(0.4 * 2.0 + 2.0 * 3.0 / 0.6));
    for (std::size_t t : {0u, 3u, 8u, 21u}) {
        const double g = 0.83;
        const double gb = 0.61;
        const double b = 1.7;
        const double x0 = 4.2;
        const double direct = std::pow(g, double(t)) * x0 +
                              (std::pow(g, double(t / 2)) + std::pow(gb, double(t / 2))) * b / (1 - g);
        CHECK(lemma_recursion_bound(t, g, gb, b, x0) == Approx(direct).epsilon(1e-14));
    }
    CHECK_THROWS_AS(lemma_recursion_bound(3, 1.0, 0.5, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(lemma_recursion_bound(3, 0.5, 1.2, 1.0, 1.0), std::domain_error);
}

TEST_CASE("double block bound") {
    RateConstants c;
    c.gamma_row = 0.5;
    c.gamma_col = 0.5;
    c.alpha_row = 1.0;
    c.b_range_norm = 1.0;
    CHECK(theorem1_bound(4, c, 1.0) == Approx(1.0625));
    CHECK(theorem1_bound(0, c, 1.0) == Approx(1.0 + 2.0 * 1.0 / (1.0 * 0.5)));

    RateConstants orth = c;
    orth.b_range_norm = 0.0;
    CHECK(theorem1_bound(6, orth, 3.0) == Approx(3.0 * std::pow(0.5, 6)));

    RateConstants g;
    g.gamma_row = 0.9;
    g.gamma_col = 0.7;
    g.alpha_row = 0.4;
    g.b_range_norm = 2.5;
    for (std::size_t t = 0; t < 60; ++t) {
        const double lhs = theorem1_bound(t, g, 5.0);
        const double rhs = lemma_recursion_bound(t, 0.9, 0.7, 2.5 * 2.5 / 0.4, 5.0);
        CHECK(std::abs(lhs - rhs) <= 1e-14 * rhs);
        CHECK(std::isfinite(lhs));
        CHECK(lhs > 0.0);
        if (t >= 2) CHECK(lhs <= theorem1_bound(t - 1, g, 5.0) * (1 + 1e-15));
    }

    RateConstants vac = g;
    vac.gamma_row = 1.0;
    CHECK_THROWS_AS(theorem1_bound(3, vac, 1.0), std::domain_error);
    RateConstants no_alpha = g;
    no_alpha.alpha_row = 0.0;
    CHECK_THROWS_AS(theorem1_bound(3, no_alpha, 1.0), std::domain_error);
}

TEST_CASE("z envelope") {
    CHECK(lemma1_envelope(0, 0.8, 3.0) == Approx(3.0));
    CHECK(lemma1_envelope(1, 0.0, 3.0) == 0.0);
    CHECK(lemma1_envelope(10, 0.9, 4.0) == Approx(4.0 * std::pow(0.9, 10)));
    for (std::size_t k = 1; k < 30; ++k) {
        CHECK(lemma1_envelope(k, 0.77, 2.0) <= lemma1_envelope(k - 1, 0.77, 2.0));
    }
    CHECK(lemma1_envelope(5, 0.5, 1.0) < lemma1_envelope(5, 0.6, 1.0));
}

TEST_CASE("extended Kaczmarz bound") {
    CHECK(rek_bound(0, 3.0, 2.0, 5.0, 0.5) == Approx(2.0 + 2.0 * 5.0 / 0.25));
    CHECK(rek_bound(2, 1.0, 2.0, 5.0, 0.5) == 0.0);
    const double k = 10.4;
    const double direct = std::pow(1.0 - 1.0 / (k * k), 37 / 2.0) * (3.1 + 2.0 * 7.2 / (0.3 * 0.3));
    CHECK(rek_bound(37, k, 3.1, 7.2, 0.3) == Approx(direct));
    CHECK_THROWS_AS(rek_bound(1, 0.5, 1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("plain Kaczmarz rate") {
    CHECK(rk_bound(0, 5.0, 2.0) == Approx(2.0));
    CHECK(rk_bound(4, 2.0, 1.0) == Approx(std::pow(0.75, 4)));
}

TEST_CASE("noise horizons") {
    Rng rng(7);
    const LinearSystem consistent = gen_gaussian_rowstd(30, 8, rng);
    CHECK(rk_horizon(consistent) == Approx(0.0).epsilon(1e-9));
    CHECK(block_horizon(consistent) == Approx(0.0).epsilon(1e-9));

    const LinearSystem noisy = gen_inconsistent(30, 8, 0.5, rng);
    const Vector e = noisy.b - mat_vec(noisy.a, noisy.x_ls);
    CHECK(rk_horizon(noisy) ==
          Approx(noisy.spectral.scaled_condition * e.cwiseAbs().maxCoeff()).epsilon(1e-10));
    const double s = noisy.spectral.sigma_min_nonzero;
    CHECK(block_horizon(noisy) == Approx(3.0 * 0.25 / (s * s)).epsilon(1e-10));

    // Unit singular values: the block floor is 3 ||e||^2.
    const DenseMatrix q = DenseMatrix::from_rows({{1, 0}, {0, 1}, {0, 0}});
    const LinearSystem unit = make_system(q, make_vector({1, 2, 0.5}));
    CHECK(block_horizon(unit) == Approx(3.0 * 0.25));

    // Rows of different norms.
    DenseMatrix scaled = noisy.a;
    scaled.values().row(0) *= 4.0;
    const LinearSystem sc = make_system(scaled, noisy.b);
    const Vector e2 = sc.b - mat_vec(sc.a, sc.x_ls);
    double worst = 0.0;
    for (std::size_t i = 0; i < sc.rows(); ++i) {
        worst = std::max(worst, std::abs(e2(static_cast<Eigen::Index>(i))) / sc.a.row(i).norm());
    }
    CHECK(rk_horizon(sc) == Approx(sc.spectral.scaled_condition * worst).epsilon(1e-12));
}

TEST_CASE("standardized paving rate") {
    CHECK(corollary1_gamma(DenseMatrix::identity(4), measured(DenseMatrix::identity(4), 2, Axis::Rows, 1)) ==
          Approx(0.5));
    CHECK(corollary1_gamma(DenseMatrix::identity(3), measured(DenseMatrix::identity(3), 1, Axis::Rows, 1)) ==
          Approx(0.0));
    Rng rng(8);
    const DenseMatrix a = row_standardize(oracle::gaussian_matrix(200, 50, rng)).matrix;
    const PavingParams pp = measured(a, 20, Axis::Rows, 9);
    const SpectralSummary s = spectral_summary(a);
    CHECK(corollary1_gamma(a, pp) ==
          Approx(1.0 - s.sigma_min_nonzero * s.sigma_min_nonzero / (20.0 * pp.beta)));
    CHECK(corollary1_reference_gamma(0.5, 2.0, 99) == Approx(1.0 - 0.5 / (4.0 * std::log(100.0))));
}

TEST_CASE("dynamic-range transport") {
    Rng rng(10);
    const DenseMatrix a_std = row_standardize(oracle::gaussian_matrix(60, 20, rng)).matrix;
    const PavingParams pp = measured(a_std, 6, Axis::Rows, 11);

    SUBCASE("standardized matrix reduces to the standardized rate") {
        const TransportedPaving t = dynamic_range_gamma(a_std, std::nullopt, pp);
        CHECK(t.gamma == Approx(corollary1_gamma(a_std, pp)));
        CHECK(t.beta == Approx(pp.beta));
        CHECK(t.a_min == Approx(1.0));
    }
    SUBCASE("worst-case delta bounds") {
        const TransportedPaving t = dynamic_range_gamma(a_std, 0.25, pp);
        CHECK(t.alpha == Approx(0.75));
        CHECK(t.beta == Approx(1.25));
        CHECK_THROWS_AS(dynamic_range_gamma(a_std, 1.0, pp), std::domain_error);
    }
    SUBCASE("larger dynamic range narrows the gap") {
        DenseMatrix wide = a_std;
        wide.values().row(0) *= 2.0;  // a_r = 4
        const TransportedPaving t1 = dynamic_range_gamma(a_std, 0.1, pp);
        const TransportedPaving t4 = dynamic_range_gamma(wide, 0.1, pp);
        CHECK(t4.a_max == Approx(4.0));
        const double s1 = spectral_summary(a_std).sigma_min_nonzero;
        const double s4 = spectral_summary(wide).sigma_min_nonzero;
        CHECK((1.0 - t4.gamma) / (s4 * s4) == Approx((1.0 - t1.gamma) / (s1 * s1) / 4.0));
        CHECK(t4.gamma > t1.gamma);
    }
    SUBCASE("rows with norms 1 through 300") {
        Rng gen(12);
        const LinearSystem sys = gen_dynamic_rows(300, 100, 0.5, gen);
        const PavingParams p_std = measured(row_standardize(sys.a).matrix, 30, Axis::Rows, 13);
        const TransportedPaving t = dynamic_range_gamma(sys.a, std::nullopt, p_std);
        CHECK(t.a_max == Approx(90000.0));
        CHECK(t.beta == Approx(90000.0 * p_std.beta));
        CHECK(t.gamma < 1.0);
        CHECK(t.gamma > 0.0);
    }
}

TEST_CASE("block coordinate descent bounds") {
    CHECK(theorem2_bound(0, 0.7, 3.0) == Approx(3.0));
    CHECK(theorem2_bound(1, 0.0, 3.0) == 0.0);
    CHECK(theorem2_bound(9, 0.7, 3.0) == Approx(3.0 * std::pow(0.7, 9)));
    CHECK(corollary2_bound(0, 0.7, 2.0, 5.0) == Approx(20.0));
    CHECK(corollary2_bound(3, 0.5, 2.0, 5.0) == Approx(20.0 / 8.0));
    for (std::size_t t = 1; t < 20; ++t) {
        CHECK(theorem2_bound(t, 0.9, 1.0) <= theorem2_bound(t - 1, 0.9, 1.0));
    }
}

TEST_CASE("empirical mean error stays under the block coordinate descent envelope") {
    Rng gen(14);
    const LinearSystem sys = gen_inconsistent(50, 12, 0.5, gen);
    MethodSetup setup{"blockcd", Method::BlockCD, 0, 4};
    const MethodConfig cfg = make_config(sys, setup, 15);
    const double gamma_bar =
        paving_rate(sys.spectral.sigma_min_nonzero, paving_bounds(sys.a, *cfg.col_partition));
    const BlockCache cols(sys.a, *cfg.col_partition);
    const std::size_t trials = 200;
    const std::size_t steps = 30;
    std::vector<double> mean_fit(steps + 1, 0.0);
    std::vector<double> mean_err(steps + 1, 0.0);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(16, "bcd", t));
        SolverState s = SolverState::initial(sys.b, 12);
        for (std::size_t k = 0; k <= steps; ++k) {
            if (k > 0) block_cd_step(s, cols, rng);
            mean_fit[k] += mat_vec(sys.a, sys.x_ls - s.x).squaredNorm() / trials;
            mean_err[k] += (sys.x_ls - s.x).squaredNorm() / trials;
        }
    }
    for (std::size_t k = 0; k <= steps; ++k) {
        CHECK(mean_fit[k] <= theorem2_bound(k, gamma_bar, sys.b_range.squaredNorm()) * 1.25);
        CHECK(mean_err[k] <= corollary2_bound(k, gamma_bar, sys.spectral.condition,
                                              sys.x_ls.squaredNorm()) * 1.25);
    }
}
