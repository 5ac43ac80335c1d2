#include "rbk/paving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rbk {

const char* to_string(Axis axis) {
    return axis == Axis::Rows ? "rows" : "cols";
}

Partition::Partition(Axis axis, std::vector<IndexSet> blocks, std::size_t universe_size)
    : axis_(axis), blocks_(std::move(blocks)), universe_size_(universe_size) {
    if (blocks_.empty()) {
        throw std::invalid_argument("Partition: no blocks");
    }
    std::vector<bool> seen(universe_size_, false);
    std::size_t covered = 0;
    for (const auto& b : blocks_) {
        if (b.empty()) {
            throw std::invalid_argument("Partition: empty block");
        }
        for (std::size_t i : b) {
            if (i >= universe_size_) {
                throw std::invalid_argument("Partition: index " + std::to_string(i) +
                                            " outside universe of size " +
                                            std::to_string(universe_size_));
            }
            if (seen[i]) {
                throw std::invalid_argument("Partition: index " + std::to_string(i) +
                                            " appears twice");
            }
            seen[i] = true;
            ++covered;
        }
    }
    if (covered != universe_size_) {
        throw std::invalid_argument("Partition: blocks do not cover the universe");
    }
}

Partition random_partition(std::size_t universe_size, std::size_t blocks, Rng& rng, Axis axis) {
    if (blocks == 0 || blocks > universe_size) {
        throw std::invalid_argument("random_partition: need 1 <= blocks <= universe size, got " +
                                    std::to_string(blocks) + " blocks for " +
                                    std::to_string(universe_size));
    }
    IndexSet perm(universe_size);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t base = universe_size / blocks;
    const std::size_t extra = universe_size % blocks;
    std::vector<IndexSet> out;
    out.reserve(blocks);
    auto it = perm.begin();
    for (std::size_t k = 0; k < blocks; ++k) {
        const std::size_t len = base + (k < extra ? 1 : 0);
        out.emplace_back(it, it + static_cast<std::ptrdiff_t>(len));
        it += static_cast<std::ptrdiff_t>(len);
    }
    return Partition(axis, std::move(out), universe_size);
}

namespace {

std::size_t axis_extent(const DenseMatrix& a, Axis axis) {
    return axis == Axis::Rows ? a.rows() : a.cols();
}

void check_conformal(const DenseMatrix& a, const Partition& partition, const char* what) {
    if (partition.universe_size() != axis_extent(a, partition.axis())) {
        throw DimensionError(std::string(what) + ": " + to_string(partition.axis()) +
                             " partition of size " + std::to_string(partition.universe_size()) +
                             " does not match " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " matrix");
    }
}

}  // namespace

DenseMatrix block_submatrix(const DenseMatrix& a, const Partition& partition, std::size_t k) {
    check_conformal(a, partition, "block_submatrix");
    return partition.axis() == Axis::Rows ? row_submatrix(a, partition.block(k))
                                          : col_submatrix(a, partition.block(k));
}

std::vector<SvdFactorization> block_factorizations(const DenseMatrix& a, const Partition& partition,
                                                   double rank_tolerance) {
    check_conformal(a, partition, "block_factorizations");
    std::vector<SvdFactorization> out;
    out.reserve(partition.size());
    for (std::size_t k = 0; k < partition.size(); ++k) {
        out.push_back(svd(block_submatrix(a, partition, k), rank_tolerance));
    }
    return out;
}

PavingParams paving_bounds(const DenseMatrix& a, const Partition& partition) {
    check_conformal(a, partition, "paving_bounds");
    PavingParams params;
    params.p = partition.size();
    params.alpha = std::numeric_limits<double>::infinity();
    params.beta = 0.0;
    for (std::size_t k = 0; k < partition.size(); ++k) {
        // Row paving of A (or of A^T for columns): the Gram matrix is
        // |tau| x |tau|, so it is singular whenever |tau| exceeds the other
        // dimension. The smallest eigenvalue is then exactly zero.
        const DenseMatrix block = block_submatrix(a, partition, k);
        const std::size_t gram_dim = partition.block(k).size();
        const SvdFactorization f = svd(block, 0.0);
        const Eigen::Index m = f.singular_values.size();
        const double smax = f.singular_values(0);
        const double smin = static_cast<std::size_t>(m) < gram_dim ? 0.0 : f.singular_values(m - 1);
        params.alpha = std::min(params.alpha, smin * smin);
        params.beta = std::max(params.beta, smax * smax);
    }
    return params;
}

namespace {

Standardized standardize(const DenseMatrix& a, Axis axis) {
    const std::size_t count = axis_extent(a, axis);
    Vector recip(static_cast<Eigen::Index>(count));
    DenseMatrix out = a;
    for (std::size_t i = 0; i < count; ++i) {
        const double norm = axis == Axis::Rows ? a.row(i).norm() : a.col(i).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw NumericalError(std::string("standardize: zero ") +
                                 (axis == Axis::Rows ? "row " : "column ") + std::to_string(i));
        }
        const double r = 1.0 / norm;
        recip(static_cast<Eigen::Index>(i)) = r;
        if (axis == Axis::Rows) {
            out.values().row(static_cast<Eigen::Index>(i)) *= r;
        } else {
            out.values().col(static_cast<Eigen::Index>(i)) *= r;
        }
    }
    return {std::move(out), DiagonalScaling{std::move(recip)}};
}

}  // namespace

Standardized row_standardize(const DenseMatrix& a) {
    return standardize(a, Axis::Rows);
}

Standardized column_standardize(const DenseMatrix& a) {
    return standardize(a, Axis::Columns);
}

Vector unscale_solution(const Vector& x, const DiagonalScaling& scaling) {
    if (x.size() != scaling.reciprocals.size()) {
        throw DimensionError("unscale_solution: vector of length " + std::to_string(x.size()) +
                             " with scaling of length " +
                             std::to_string(scaling.reciprocals.size()));
    }
    return x.cwiseProduct(scaling.reciprocals);
}

double dynamic_range(const DenseMatrix& a) {
    const Eigen::VectorXd sq = a.values().rowwise().squaredNorm();
    const double lo = sq.minCoeff();
    if (!(lo > 0.0)) {
        throw NumericalError("dynamic_range: zero row");
    }
    return sq.maxCoeff() / lo;
}

}  // namespace rbk
