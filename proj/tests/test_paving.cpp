#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rbk/harness.hpp"
#include "rbk/paving.hpp"

#include <algorithm>
#include <array>
#include <cmath>

using namespace rbk;
using doctest::Approx;

namespace {

IndexSet flatten_sorted(const Partition& p) {
    IndexSet all;
    for (const auto& b : p.blocks()) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    return all;
}

IndexSet iota(std::size_t n) {
    IndexSet v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

DenseMatrix unit_rows(std::size_t n, std::size_t d, Rng& rng) {
    return row_standardize(oracle::gaussian_matrix(n, d, rng)).matrix;
}

}  // namespace

TEST_CASE("Partition validates its blocks") {
    CHECK_NOTHROW(Partition(Axis::Rows, {{0, 2}, {1}}, 3));
    CHECK_THROWS(Partition(Axis::Rows, {}, 3));
    CHECK_THROWS(Partition(Axis::Rows, {{0, 1}, {}}, 2));
    CHECK_THROWS(Partition(Axis::Rows, {{0, 1}, {1, 2}}, 3));
    CHECK_THROWS(Partition(Axis::Rows, {{0, 1}}, 3));
    CHECK_THROWS(Partition(Axis::Rows, {{0, 3}}, 3));
}

TEST_CASE("random_partition") {
    Rng rng(1);
    SUBCASE("singletons") {
        const Partition p = random_partition(4, 4, rng);
        CHECK(p.size() == 4);
        for (const auto& b : p.blocks()) CHECK(b.size() == 1);
        CHECK(flatten_sorted(p) == iota(4));
    }
    SUBCASE("one block") {
        const Partition p = random_partition(4, 1, rng);
        REQUIRE(p.size() == 1);
        IndexSet b = p.block(0);
        std::sort(b.begin(), b.end());
        CHECK(b == iota(4));
    }
    SUBCASE("sizes and union") {
        const Partition p = random_partition(10, 3, rng);
        CHECK(p.block(0).size() == 4);
        CHECK(p.block(1).size() == 3);
        CHECK(p.block(2).size() == 3);
        CHECK(flatten_sorted(p) == iota(10));
    }
    SUBCASE("many random shapes") {
        for (std::size_t n = 1; n <= 40; n += 3) {
            for (std::size_t blocks = 1; blocks <= n; blocks += 2) {
                const Partition p = random_partition(n, blocks, rng, Axis::Columns);
                CHECK(p.axis() == Axis::Columns);
                CHECK(flatten_sorted(p) == iota(n));
                for (std::size_t k = 0; k < blocks; ++k) {
                    const std::size_t expected = n / blocks + (k < n % blocks ? 1 : 0);
                    CHECK(p.block(k).size() == expected);
                }
            }
        }
    }
    SUBCASE("deterministic under seed") {
        Rng a(99);
        Rng b(99);
        CHECK(random_partition(50, 7, a).blocks() == random_partition(50, 7, b).blocks());
    }
    CHECK_THROWS(random_partition(4, 0, rng));
    CHECK_THROWS(random_partition(4, 5, rng));
}

TEST_CASE("paving_bounds") {
    Rng rng(2);
    SUBCASE("orthonormal rows") {
        const PavingParams pp = paving_bounds(DenseMatrix::identity(4), random_partition(4, 2, rng));
        CHECK(pp.p == 2);
        CHECK(pp.alpha == Approx(1.0));
        CHECK(pp.beta == Approx(1.0));
    }
    SUBCASE("diag(2, 1) singletons") {
        const std::array<double, 2> d{2.0, 1.0};
        const PavingParams pp =
            paving_bounds(DenseMatrix::diagonal(d), Partition(Axis::Rows, {{0}, {1}}, 2));
        CHECK(pp.alpha == Approx(1.0));
        CHECK(pp.beta == Approx(4.0));
    }
    SUBCASE("matches a brute-force eigensolve per block, with tight extremes") {
        const DenseMatrix a = unit_rows(30, 10, rng);
        const Partition p = random_partition(30, 5, rng);
        const PavingParams pp = paving_bounds(a, p);
        double lo = 1e300;
        double hi = 0.0;
        for (const auto& blk : p.blocks()) {
            const auto ev = oracle::jacobi_eigenvalues(
                oracle::gram_rows(oracle::to_mat(row_submatrix(a, blk))));
            CHECK(pp.alpha <= ev.front() * (1 + 1e-10) + 1e-14);
            CHECK(ev.back() <= pp.beta * (1 + 1e-10));
            lo = std::min(lo, ev.front());
            hi = std::max(hi, ev.back());
        }
        CHECK(pp.alpha == Approx(lo).epsilon(1e-10));
        CHECK(pp.beta == Approx(hi).epsilon(1e-10));
    }
    SUBCASE("column paving is the row paving of the transpose") {
        const DenseMatrix a = oracle::gaussian_matrix(12, 8, rng);
        const Partition cols = random_partition(8, 3, rng, Axis::Columns);
        const Partition rows_of_t(Axis::Rows, cols.blocks(), 8);
        const PavingParams c = paving_bounds(a, cols);
        const PavingParams r = paving_bounds(a.transpose(), rows_of_t);
        CHECK(c.alpha == Approx(r.alpha));
        CHECK(c.beta == Approx(r.beta));
    }
    SUBCASE("blocks with more rows than columns have alpha = 0") {
        const DenseMatrix a = unit_rows(20, 3, rng);
        const PavingParams pp = paving_bounds(a, random_partition(20, 2, rng));
        CHECK(pp.alpha == Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("size mismatch") {
        CHECK_THROWS_AS(paving_bounds(DenseMatrix::identity(4), random_partition(5, 2, rng)),
                        DimensionError);
    }
}

TEST_CASE("paving of row-standardized Gaussian matrices stays well conditioned") {
    std::size_t ok = 0;
    const std::size_t seeds = 40;
    for (std::size_t s = 0; s < seeds; ++s) {
        Rng rng(derive_seed(7, "pave", s));
        const DenseMatrix a = unit_rows(300, 100, rng);
        const PavingParams pp = paving_bounds(a, random_partition(300, 30, rng));
        CHECK(std::isfinite(pp.alpha));
        CHECK(std::isfinite(pp.beta));
        if (pp.beta <= 4.0) ++ok;
    }
    CHECK(ok == seeds);
}

TEST_CASE("row_standardize") {
    SUBCASE("already standardized") {
        const DenseMatrix a = DenseMatrix::identity(3);
        const Standardized st = row_standardize(a);
        CHECK(st.matrix == a);
        CHECK(st.scaling.reciprocals == make_vector({1, 1, 1}));
    }
    SUBCASE("3-4-5") {
        const Standardized st = row_standardize(DenseMatrix::from_rows({{3, 4}}));
        CHECK(st.matrix(0, 0) == Approx(0.6));
        CHECK(st.matrix(0, 1) == Approx(0.8));
        CHECK(st.scaling.reciprocals(0) == Approx(0.2));
    }
    SUBCASE("random") {
        Rng rng(3);
        const DenseMatrix a = oracle::gaussian_matrix(25, 7, rng);
        const Standardized st = row_standardize(a);
        for (std::size_t i = 0; i < 25; ++i) {
            CHECK(std::abs(st.matrix.row(i).norm() - 1.0) <= 1e-12);
            CHECK((st.scaling.reciprocals(static_cast<Eigen::Index>(i)) * a.row(i) - st.matrix.row(i))
                      .norm() <= 1e-14);
        }
    }
    CHECK_THROWS_AS(row_standardize(DenseMatrix::from_rows({{1, 2}, {0, 0}})), NumericalError);
}

TEST_CASE("column_standardize") {
    SUBCASE("orthonormal columns unchanged") {
        const DenseMatrix a = DenseMatrix::from_rows({{1, 0}, {0, 1}, {0, 0}});
        CHECK(column_standardize(a).matrix == a);
    }
    SUBCASE("single column") {
        const Standardized st = column_standardize(DenseMatrix::from_rows({{3}, {4}}));
        CHECK(st.matrix(0, 0) == Approx(0.6));
        CHECK(st.matrix(1, 0) == Approx(0.8));
    }
    SUBCASE("random") {
        Rng rng(4);
        const Standardized st = column_standardize(oracle::gaussian_matrix(9, 6, rng));
        for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(st.matrix.col(j).norm() - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(column_standardize(DenseMatrix::from_rows({{1, 0}, {2, 0}})), NumericalError);
}

TEST_CASE("unscale_solution") {
    const DiagonalScaling ones{make_vector({1, 1})};
    CHECK(unscale_solution(make_vector({3, 4}), ones) == make_vector({3, 4}));
    CHECK(unscale_solution(make_vector({2, 2}), DiagonalScaling{make_vector({0.5, 1})}) ==
          make_vector({1, 2}));
    CHECK_THROWS_AS(unscale_solution(make_vector({1}), ones), DimensionError);

    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        DenseMatrix a = oracle::gaussian_matrix(20, 8, rng);
        for (std::size_t j = 0; j < 8; ++j) a.values().col(static_cast<Eigen::Index>(j)) *= double(j + 1);
        const Vector b = oracle::gaussian_vector(20, rng);
        const Standardized st = column_standardize(a);
        const Vector direct = least_squares_oracle(a, b);
        const Vector via = unscale_solution(least_squares_oracle(st.matrix, b), st.scaling);
        CHECK((direct - via).norm() <= 1e-8 * std::max(1.0, direct.norm()));
    }
}

TEST_CASE("dynamic_range") {
    Rng rng(6);
    CHECK(dynamic_range(unit_rows(10, 4, rng)) == Approx(1.0));
    CHECK(dynamic_range(DenseMatrix::from_rows({{1, 0}, {0, 2}})) == Approx(4.0));
    Rng gen(7);
    const LinearSystem sys = gen_dynamic_rows(300, 100, 0.5, gen);
    CHECK(dynamic_range(sys.a) == Approx(90000.0).epsilon(1e-10));
    CHECK_THROWS_AS(dynamic_range(DenseMatrix::from_rows({{1, 0}, {0, 0}})), NumericalError);
}

TEST_CASE("block_factorizations") {
    Rng rng(8);
    SUBCASE("identity") {
        const auto fs = block_factorizations(DenseMatrix::identity(4), random_partition(4, 2, rng));
        REQUIRE(fs.size() == 2);
        for (const auto& f : fs) {
            for (Eigen::Index i = 0; i < f.singular_values.size(); ++i) {
                CHECK(f.singular_values(i) == Approx(1.0));
            }
        }
    }
    SUBCASE("single block equals svd(A)") {
        const DenseMatrix a = oracle::gaussian_matrix(6, 4, rng);
        const auto fs = block_factorizations(a, Partition(Axis::Rows, {iota(6)}, 6));
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].singular_values.isApprox(svd(a).singular_values, 1e-12));
    }
    SUBCASE("each factor reconstructs its block") {
        const DenseMatrix a = oracle::gaussian_matrix(20, 9, rng);
        for (Axis axis : {Axis::Rows, Axis::Columns}) {
            const Partition p = random_partition(axis == Axis::Rows ? 20 : 9, 4, rng, axis);
            const auto fs = block_factorizations(a, p);
            for (std::size_t k = 0; k < p.size(); ++k) {
                const DenseMatrix blk = block_submatrix(a, p, k);
                CHECK(blk.rows() == (axis == Axis::Rows ? p.block(k).size() : 20));
                const Eigen::MatrixXd rebuilt =
                    fs[k].u.values() * fs[k].singular_values.asDiagonal() * fs[k].v.values().transpose();
                CHECK((blk.values() - rebuilt).norm() <= 1e-10 * blk.frobenius_norm());
            }
        }
    }
}
