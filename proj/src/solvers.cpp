#include "rbk/solvers.hpp"

#include <cmath>
#include <ctime>
#include <limits>
#include <string>

namespace rbk {

std::string_view method_tag(Method m) {
    switch (m) {
        case Method::RK: return "rk";
        case Method::REK: return "rek";
        case Method::BlockKaczmarz: return "block";
        case Method::DoubleBlock: return "double";
        case Method::BlockCD: return "blockcd";
    }
    return "unknown";
}

Method parse_method(std::string_view tag) {
    for (Method m : {Method::RK, Method::REK, Method::BlockKaczmarz, Method::DoubleBlock,
                     Method::BlockCD}) {
        if (method_tag(m) == tag) return m;
    }
    throw ConfigError("unknown method '" + std::string(tag) +
                      "' (expected rk, rek, block, double or blockcd)");
}

bool uses_z(Method m) {
    return m == Method::REK || m == Method::DoubleBlock || m == Method::BlockCD;
}

SolverState SolverState::initial(const Vector& b, std::size_t cols) {
    return SolverState{Vector::Zero(static_cast<Eigen::Index>(cols)), b, 0};
}

Problem::Problem(DenseMatrix a_in, Vector b_in)
    : a(std::move(a_in)), at(a.transpose()), b(std::move(b_in)) {
    if (static_cast<std::size_t>(b.size()) != a.rows()) {
        throw DimensionError("Problem: right-hand side length " + std::to_string(b.size()) +
                             " does not match " + std::to_string(a.rows()) + " rows");
    }
    row_norm_sq = a.values().rowwise().squaredNorm();
    col_norm_sq = a.values().colwise().squaredNorm().transpose();
}

BlockCache::BlockCache(const DenseMatrix& a, Partition p)
    : partition(std::move(p)), factors(block_factorizations(a, partition)) {
    blocks.reserve(partition.size());
    for (std::size_t k = 0; k < partition.size(); ++k) {
        blocks.push_back(block_submatrix(a, partition, k));
    }
}

NormSampler::NormSampler(const Problem& problem)
    : rows_(problem.row_norm_sq.begin(), problem.row_norm_sq.end()),
      cols_(problem.col_norm_sq.begin(), problem.col_norm_sq.end()) {}

std::size_t uniform_block(std::size_t count, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

namespace {

double checked_norm_sq(const Vector& norms, std::size_t i, const char* what) {
    if (i >= static_cast<std::size_t>(norms.size())) {
        throw DimensionError(std::string(what) + ": index out of range");
    }
    const double v = norms(static_cast<Eigen::Index>(i));
    if (!(v > 0.0)) {
        throw NumericalError(std::string(what) + " " + std::to_string(i) + " is zero");
    }
    return v;
}

void check_block(const BlockCache& cache, std::size_t k) {
    if (k >= cache.size()) {
        throw DimensionError("block index " + std::to_string(k) + " out of range");
    }
}

void kaczmarz_row_step(Vector& x, const Problem& p, std::size_t row, double target) {
    const double norm_sq = checked_norm_sq(p.row_norm_sq, row, "row");
    const auto a_i = p.a.row(row);
    x += ((target - a_i.dot(x)) / norm_sq) * a_i.transpose();
}

void column_projection_step(Vector& z, const Problem& p, std::size_t col) {
    const double norm_sq = checked_norm_sq(p.col_norm_sq, col, "column");
    const auto a_k = p.at.row(col);
    z -= (a_k.dot(z) / norm_sq) * a_k.transpose();
}

void row_block_step(Vector& x, const Problem& p, const BlockCache& rows, std::size_t k,
                    const Vector* z) {
    check_block(rows, k);
    const IndexSet& idx = rows.partition.block(k);
    Vector r = gather(p.b, idx) - rows.blocks[k].values() * x;
    if (z != nullptr) {
        r -= gather(*z, idx);
    }
    x += pinv_apply(rows.factors[k], r);
}

}  // namespace

void rk_update(SolverState& s, const Problem& p, std::size_t row) {
    kaczmarz_row_step(s.x, p, row, p.b(static_cast<Eigen::Index>(row)));
    ++s.iteration;
}

void rek_update(SolverState& s, const Problem& p, std::size_t row, std::size_t col) {
    column_projection_step(s.z, p, col);
    const auto i = static_cast<Eigen::Index>(row);
    kaczmarz_row_step(s.x, p, row, p.b(i) - s.z(i));
    ++s.iteration;
}

void block_kaczmarz_update(SolverState& s, const Problem& p, const BlockCache& rows, std::size_t k) {
    row_block_step(s.x, p, rows, k, nullptr);
    ++s.iteration;
}

void double_block_update(SolverState& s, const Problem& p, const BlockCache& rows,
                         const BlockCache& cols, std::size_t row_block, std::size_t col_block) {
    check_block(cols, col_block);
    const Vector w = pinv_apply(cols.factors[col_block], s.z);
    s.z -= cols.blocks[col_block].values() * w;
    row_block_step(s.x, p, rows, row_block, &s.z);
    ++s.iteration;
}

void block_cd_update(SolverState& s, const BlockCache& cols, std::size_t k) {
    check_block(cols, k);
    const IndexSet& idx = cols.partition.block(k);
    const Vector w = pinv_apply(cols.factors[k], s.z);
    for (std::size_t j = 0; j < idx.size(); ++j) {
        s.x(static_cast<Eigen::Index>(idx[j])) += w(static_cast<Eigen::Index>(j));
    }
    s.z -= cols.blocks[k].values() * w;
    ++s.iteration;
}

void hybrid_update(SolverState& s, const Problem& p, const BlockCache& rows, std::size_t row_block,
                   std::size_t col) {
    column_projection_step(s.z, p, col);
    row_block_step(s.x, p, rows, row_block, &s.z);
    ++s.iteration;
}

void rk_step(SolverState& s, const Problem& p, NormSampler& sampler, Rng& rng) {
    rk_update(s, p, sampler.row(rng));
}

void rek_step(SolverState& s, const Problem& p, NormSampler& sampler, Rng& rng) {
    // Row and column are drawn independently.
    const std::size_t col = sampler.col(rng);
    const std::size_t row = sampler.row(rng);
    rek_update(s, p, row, col);
}

void block_kaczmarz_step(SolverState& s, const Problem& p, const BlockCache& rows, Rng& rng) {
    block_kaczmarz_update(s, p, rows, uniform_block(rows.size(), rng));
}

void double_block_step(SolverState& s, const Problem& p, const BlockCache& rows,
                       const BlockCache& cols, Rng& rng) {
    const std::size_t col_block = uniform_block(cols.size(), rng);
    const std::size_t row_block = uniform_block(rows.size(), rng);
    double_block_update(s, p, rows, cols, row_block, col_block);
}

void block_cd_step(SolverState& s, const BlockCache& cols, Rng& rng) {
    block_cd_update(s, cols, uniform_block(cols.size(), rng));
}

void validate(const MethodConfig& c, std::size_t rows, std::size_t cols) {
    const std::string tag(method_tag(c.method));
    auto need = [&](const std::optional<Partition>& part, Axis axis, std::size_t extent,
                    const char* name) {
        if (!part) {
            throw ConfigError(tag + " requires a " + name + " partition");
        }
        if (part->axis() != axis) {
            throw ConfigError(tag + ": " + name + " partition has the wrong axis");
        }
        if (part->universe_size() != extent) {
            throw ConfigError(tag + ": " + name + " partition covers " +
                              std::to_string(part->universe_size()) + " indices, expected " +
                              std::to_string(extent));
        }
    };
    switch (c.method) {
        case Method::RK:
        case Method::REK:
            break;
        case Method::BlockKaczmarz:
            need(c.row_partition, Axis::Rows, rows, "row");
            break;
        case Method::DoubleBlock:
            need(c.row_partition, Axis::Rows, rows, "row");
            if (!c.hybrid_projection) need(c.col_partition, Axis::Columns, cols, "column");
            break;
        case Method::BlockCD:
            need(c.col_partition, Axis::Columns, cols, "column");
            break;
    }
    if (c.standardize_columns && c.method != Method::BlockCD) {
        throw ConfigError("column standardization is only supported for blockcd");
    }
    if (c.hybrid_projection && c.method != Method::DoubleBlock) {
        throw ConfigError("hybrid projection is only supported for double");
    }
}

std::size_t epoch_length(Method m, std::size_t n, std::size_t d, std::size_t p_row,
                         std::size_t p_col) {
    (void)d;
    switch (m) {
        case Method::RK:
        case Method::REK:
            return n;
        case Method::BlockKaczmarz:
        case Method::DoubleBlock:
            return p_row;
        case Method::BlockCD:
            return (n + p_col - 1) / p_col;
    }
    return n;
}

double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

namespace {

Problem make_problem(const LinearSystem& system, const MethodConfig& config,
                     std::optional<DiagonalScaling>& scaling) {
    if (config.standardize_columns) {
        Standardized st = column_standardize(system.a);
        scaling = std::move(st.scaling);
        return Problem(std::move(st.matrix), system.b);
    }
    return Problem(system.a, system.b);
}

}  // namespace

PreparedSolver::PreparedSolver(const LinearSystem& system, MethodConfig config)
    : system_(&system),
      config_((validate(config, system.rows(), system.cols()), std::move(config))),
      problem_(make_problem(system, config_, scaling_)) {
    const double start = thread_cpu_seconds();
    const bool need_rows = config_.method == Method::BlockKaczmarz ||
                           config_.method == Method::DoubleBlock;
    const bool need_cols = (config_.method == Method::DoubleBlock && !config_.hybrid_projection) ||
                           config_.method == Method::BlockCD;
    if (need_rows) rows_.emplace(problem_.a, *config_.row_partition);
    if (need_cols) cols_.emplace(problem_.a, *config_.col_partition);
    setup_seconds_ = thread_cpu_seconds() - start;
    epoch_iterations_ = epoch_length(config_.method, system.rows(), system.cols(),
                                     rows_ ? rows_->size() : 1, cols_ ? cols_->size() : 1);
}

Trace PreparedSolver::run(const StopRule& stop, std::uint64_t seed) const {
    if (!(stop.error_threshold > 0.0)) {
        throw ConfigError("stop rule: error threshold must be positive");
    }
    const LinearSystem& sys = *system_;
    Rng rng(seed);
    SolverState s = SolverState::initial(problem_.b, problem_.a.cols());
    std::optional<NormSampler> sampler;
    if (config_.method == Method::RK || config_.method == Method::REK ||
        config_.hybrid_projection) {
        sampler.emplace(problem_);
    }
    const bool track_z = uses_z(config_.method);

    Trace trace;
    trace.setup_seconds = setup_seconds_;
    trace.rows.reserve(std::min<std::size_t>(stop.max_epochs + 1, 100000));
    double cpu = 0.0;

    auto original_x = [&]() { return scaling_ ? unscale_solution(s.x, *scaling_) : s.x; };
    auto record = [&](std::size_t epoch) {
        const Vector x = original_x();
        TraceRow row;
        row.epoch = epoch;
        row.iteration = s.iteration;
        row.error = (x - sys.x_ls).norm();
        row.residual = (sys.b - sys.a.values() * x).norm();
        row.z_error = track_z ? (s.z - sys.b_perp).norm()
                              : std::numeric_limits<double>::quiet_NaN();
        row.cpu_seconds = cpu;
        trace.rows.push_back(row);
    };
    auto satisfied = [&]() {
        const TraceRow& last = trace.rows.back();
        if (stop.criterion == StopCriterion::OracleError) {
            return last.error <= stop.error_threshold;
        }
        if (last.residual == 0.0) return true;
        if (trace.rows.size() < 2) return false;
        const double prev = trace.rows[trace.rows.size() - 2].residual;
        return std::abs(prev - last.residual) <= stop.error_threshold * prev;
    };

    record(0);
    if (satisfied()) {
        trace.converged = true;
        trace.x = original_x();
        return trace;
    }
    for (std::size_t epoch = 1; epoch <= stop.max_epochs; ++epoch) {
        const double start = thread_cpu_seconds();
        for (std::size_t it = 0; it < epoch_iterations_; ++it) {
            switch (config_.method) {
                case Method::RK:
                    rk_step(s, problem_, *sampler, rng);
                    break;
                case Method::REK:
                    rek_step(s, problem_, *sampler, rng);
                    break;
                case Method::BlockKaczmarz:
                    block_kaczmarz_step(s, problem_, *rows_, rng);
                    break;
                case Method::DoubleBlock:
                    if (config_.hybrid_projection) {
                        const std::size_t col = sampler->col(rng);
                        hybrid_update(s, problem_, *rows_, uniform_block(rows_->size(), rng), col);
                    } else {
                        double_block_step(s, problem_, *rows_, *cols_, rng);
                    }
                    break;
                case Method::BlockCD:
                    block_cd_step(s, *cols_, rng);
                    break;
            }
        }
        cpu += thread_cpu_seconds() - start;
        record(epoch);
        if (satisfied()) {
            trace.converged = true;
            break;
        }
    }
    trace.x = original_x();
    return trace;
}

Trace run(const LinearSystem& system, const MethodConfig& config, const StopRule& stop) {
    const PreparedSolver prepared(system, config);
    return prepared.run(stop);
}

}  // namespace rbk
