#pragma once

// Randomized Kaczmarz family: single-step updates for each method and a
// shared run loop with epoch accounting and stopping rules.

#include "rbk/core.hpp"
#include "rbk/paving.hpp"
#include "rbk/random.hpp"
#include "rbk/system.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace rbk {

enum class Method {
    RK,             // randomized Kaczmarz, rows sampled by squared norm
    REK,            // randomized extended Kaczmarz
    BlockKaczmarz,  // row-block projections, no z-sequence
    DoubleBlock,    // column-block z projection + row-block Kaczmarz step
    BlockCD,        // column-block least-squares coordinate descent
};

/// Short tag used on the command line and in CSV files: rk, rek, block,
/// double, blockcd.
std::string_view method_tag(Method m);
Method parse_method(std::string_view tag);
bool uses_z(Method m);

/// Iterate x (length d) and auxiliary z (length n).
struct SolverState {
    Vector x;
    Vector z;
    std::size_t iteration = 0;

    /// x = 0, z = b.
    static SolverState initial(const Vector& b, std::size_t cols);
};

/// A and b plus the norms the samplers and projections reuse every step.
struct Problem {
    Problem(DenseMatrix a, Vector b);

    DenseMatrix a;
    DenseMatrix at;  // contiguous columns
    Vector b;
    Vector row_norm_sq;
    Vector col_norm_sq;
};

/// Block submatrices of one partition with their SVDs, computed once.
struct BlockCache {
    BlockCache(const DenseMatrix& a, Partition partition);

    Partition partition;
    std::vector<DenseMatrix> blocks;
    std::vector<SvdFactorization> factors;

    std::size_t size() const { return partition.size(); }
};

/// Row and column samplers with probability proportional to squared norm.
class NormSampler {
public:
    explicit NormSampler(const Problem& problem);
    std::size_t row(Rng& rng) { return rows_(rng); }
    std::size_t col(Rng& rng) { return cols_(rng); }

private:
    std::discrete_distribution<std::size_t> rows_;
    std::discrete_distribution<std::size_t> cols_;
};

std::size_t uniform_block(std::size_t count, Rng& rng);

// Deterministic updates with the sampled indices given explicitly.

/// Project x onto {<a_row, x> = b[row]}.
void rk_update(SolverState& s, const Problem& p, std::size_t row);
/// z step along column `col`, then x step on `row` with target b[row] - z[row].
void rek_update(SolverState& s, const Problem& p, std::size_t row, std::size_t col);
/// x += pinv(A_tau) (b_tau - A_tau x) for row block `k`.
void block_kaczmarz_update(SolverState& s, const Problem& p, const BlockCache& rows, std::size_t k);
/// z -= A_tau pinv(A_tau) z for column block `col_block`, then the row-block
/// step x += pinv(A_u) (b_u - z_u - A_u x) for row block `row_block`.
void double_block_update(SolverState& s, const Problem& p, const BlockCache& rows,
                         const BlockCache& cols, std::size_t row_block, std::size_t col_block);
/// w = pinv(A_tau) z; x_tau += w; z -= A_tau w.
void block_cd_update(SolverState& s, const BlockCache& cols, std::size_t k);
/// Single-column z step (as in REK) followed by a row-block step. Kept only
/// to reproduce the mismatched-speed experiment.
void hybrid_update(SolverState& s, const Problem& p, const BlockCache& rows, std::size_t row_block,
                   std::size_t col);

// Randomized steps.

void rk_step(SolverState& s, const Problem& p, NormSampler& sampler, Rng& rng);
void rek_step(SolverState& s, const Problem& p, NormSampler& sampler, Rng& rng);
void block_kaczmarz_step(SolverState& s, const Problem& p, const BlockCache& rows, Rng& rng);
void double_block_step(SolverState& s, const Problem& p, const BlockCache& rows,
                       const BlockCache& cols, Rng& rng);
void block_cd_step(SolverState& s, const BlockCache& cols, Rng& rng);

struct MethodConfig {
    Method method = Method::DoubleBlock;
    std::optional<Partition> row_partition;
    std::optional<Partition> col_partition;
    std::uint64_t seed = 0;
    /// BlockCD only: iterate on A D (unit columns) and report D x.
    bool standardize_columns = false;
    /// DoubleBlock only: replace the column-block z step by a single column.
    bool hybrid_projection = false;
};

/// Throws ConfigError if partitions are missing, misdirected or misplaced.
void validate(const MethodConfig& config, std::size_t rows, std::size_t cols);

/// Iterations per epoch: n for RK/REK, p_row for the row-block methods and
/// ceil(n / p_col) for BlockCD.
std::size_t epoch_length(Method m, std::size_t n, std::size_t d, std::size_t p_row,
                         std::size_t p_col);

enum class StopCriterion {
    OracleError,          // ||x_k - x_LS|| <= threshold
    ResidualStagnation,   // relative change of ||b - A x_k|| between epochs <= threshold
};

struct StopRule {
    std::size_t max_epochs = 100;
    double error_threshold = 1e-6;
    StopCriterion criterion = StopCriterion::OracleError;
};

struct TraceRow {
    std::size_t epoch = 0;
    std::size_t iteration = 0;
    double error = 0.0;        // ||x_k - x_LS||
    double residual = 0.0;     // ||b - A x_k||
    double z_error = 0.0;      // ||z_k - b_perp||, NaN without a z-sequence
    double cpu_seconds = 0.0;  // solver time only, cumulative
};

struct Trace {
    std::vector<TraceRow> rows;
    bool converged = false;
    double setup_seconds = 0.0;  // block factorizations, not included in rows
    Vector x;                    // final iterate in original coordinates
};

/// Everything a run needs that does not depend on the seed. Immutable after
/// construction and safe to share between concurrent runs.
class PreparedSolver {
public:
    PreparedSolver(const LinearSystem& system, MethodConfig config);

    Trace run(const StopRule& stop) const { return run(stop, config_.seed); }
    Trace run(const StopRule& stop, std::uint64_t seed) const;

    const MethodConfig& config() const { return config_; }
    std::size_t epoch_iterations() const { return epoch_iterations_; }
    double setup_seconds() const { return setup_seconds_; }

private:
    const LinearSystem* system_;
    MethodConfig config_;
    std::optional<DiagonalScaling> scaling_;  // declared before problem_, which fills it
    Problem problem_;
    std::optional<BlockCache> rows_;
    std::optional<BlockCache> cols_;
    std::size_t epoch_iterations_ = 0;
    double setup_seconds_ = 0.0;
};

Trace run(const LinearSystem& system, const MethodConfig& config, const StopRule& stop);

/// Processor time consumed by the calling thread.
double thread_cpu_seconds();

}  // namespace rbk
