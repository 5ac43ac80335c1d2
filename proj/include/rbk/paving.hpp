#pragma once

// Row/column partitions, diagonal standardization and measured paving
// parameters.

#include "rbk/core.hpp"
#include "rbk/random.hpp"

#include <vector>

namespace rbk {

enum class Axis { Rows, Columns };

const char* to_string(Axis axis);

/// Ordered disjoint nonempty blocks whose union is [0, universe_size).
class Partition {
public:
    Partition(Axis axis, std::vector<IndexSet> blocks, std::size_t universe_size);

    Axis axis() const { return axis_; }
    const std::vector<IndexSet>& blocks() const { return blocks_; }
    const IndexSet& block(std::size_t k) const { return blocks_.at(k); }
    std::size_t size() const { return blocks_.size(); }
    std::size_t universe_size() const { return universe_size_; }

private:
    Axis axis_;
    std::vector<IndexSet> blocks_;
    std::size_t universe_size_;
};

/// A uniformly random permutation of [0, universe_size) cut into `blocks`
/// contiguous chunks. Chunk sizes differ by at most one; the first
/// universe_size % blocks chunks carry the extra element.
Partition random_partition(std::size_t universe_size, std::size_t blocks, Rng& rng,
                           Axis axis = Axis::Rows);

/// Measured (p, alpha, beta): extreme squared singular values over blocks.
struct PavingParams {
    std::size_t p = 0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// For a column partition the bounds are those of the row paving of A^T.
PavingParams paving_bounds(const DenseMatrix& a, const Partition& partition);

/// Entries of a positive diagonal matrix.
struct DiagonalScaling {
    Vector reciprocals;
};

struct Standardized {
    DenseMatrix matrix;
    DiagonalScaling scaling;
};

/// D~ A with unit-norm rows; reciprocals[i] = 1 / ||a_i||.
Standardized row_standardize(const DenseMatrix& a);
/// A D with unit-norm columns; reciprocals[j] = 1 / ||a^(j)||.
Standardized column_standardize(const DenseMatrix& a);

/// Maps a solution of the column-standardized system back: x[i] * reciprocals[i].
Vector unscale_solution(const Vector& x, const DiagonalScaling& scaling);

/// max_i ||a_i||^2 / min_i ||a_i||^2.
double dynamic_range(const DenseMatrix& a);

/// Row (or column) block submatrix selected by block k of `partition`.
DenseMatrix block_submatrix(const DenseMatrix& a, const Partition& partition, std::size_t k);

/// One SVD per block, in partition order.
std::vector<SvdFactorization> block_factorizations(const DenseMatrix& a, const Partition& partition,
                                                   double rank_tolerance = kDefaultRankTolerance);

}  // namespace rbk
