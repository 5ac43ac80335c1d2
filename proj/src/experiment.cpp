#include "rbk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <stdexcept>
#include <thread>

namespace rbk {

MethodConfig make_config(const LinearSystem& system, const MethodSetup& setup,
                         std::uint64_t master_seed) {
    MethodConfig config;
    config.method = setup.method;
    config.standardize_columns = setup.standardize_columns;
    config.hybrid_projection = setup.hybrid_projection;
    config.seed = master_seed;
    if (setup.row_blocks > 0) {
        Rng rng(derive_seed(master_seed, "row-partition", setup.row_blocks));
        config.row_partition = random_partition(system.rows(), setup.row_blocks, rng, Axis::Rows);
    }
    if (setup.col_blocks > 0) {
        Rng rng(derive_seed(master_seed, "col-partition", setup.col_blocks));
        config.col_partition = random_partition(system.cols(), setup.col_blocks, rng, Axis::Columns);
    }
    return config;
}

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& tag, std::size_t trial) {
    return derive_seed(master_seed, tag, trial);
}

std::vector<ExperimentRecord> run_experiment(const LinearSystem& system, std::uint64_t master_seed,
                                             const std::vector<MethodSetup>& methods,
                                             std::size_t trials, const StopRule& stop,
                                             unsigned threads) {
    if (trials == 0) {
        throw ConfigError("run_experiment: need at least one trial");
    }
    std::vector<PreparedSolver> prepared;
    prepared.reserve(methods.size());
    for (const auto& m : methods) {
        prepared.emplace_back(system, make_config(system, m, master_seed));
    }

    std::vector<ExperimentRecord> records(methods.size() * trials);
    // Jobs interleave methods so timing drift hits every method alike; records stay method-major.
    auto run_one = [&](std::size_t job) {
        const std::size_t mi = job % methods.size();
        const std::size_t trial = job / methods.size();
        records[mi * trials + trial] = ExperimentRecord{
            trial, methods[mi].tag,
            prepared[mi].run(stop, trial_seed(master_seed, methods[mi].tag, trial))};
    };

    const std::size_t jobs = records.size();
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
    if (workers == 1) {
        for (std::size_t j = 0; j < jobs; ++j) run_one(j);
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t j = next++; j < jobs; j = next++) run_one(j);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return records;
}

std::vector<ExperimentRecord> run_experiment(const ProblemSpec& spec,
                                             const std::vector<MethodSetup>& methods,
                                             std::size_t trials, const StopRule& stop,
                                             unsigned threads) {
    const LinearSystem system = generate(spec);
    return run_experiment(system, spec.seed, methods, trials, stop, threads);
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::vector<Band> aggregate_bands(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("aggregate_bands: no records");
    }
    std::vector<std::string> order;
    std::map<std::string, std::vector<const Trace*>> grouped;
    for (const auto& r : records) {
        if (r.trace.rows.empty()) {
            throw std::invalid_argument("aggregate_bands: empty trace for " + r.method);
        }
        auto [it, inserted] = grouped.try_emplace(r.method);
        if (inserted) order.push_back(r.method);
        it->second.push_back(&r.trace);
    }

    std::vector<Band> bands;
    for (const auto& method : order) {
        const auto& traces = grouped[method];
        std::size_t last_epoch = 0;
        for (const Trace* t : traces) last_epoch = std::max(last_epoch, t->rows.back().epoch);
        Band band{method, {}};
        std::vector<double> errors(traces.size());
        std::vector<double> cpu(traces.size());
        for (std::size_t e = 0; e <= last_epoch; ++e) {
            BandRow row;
            row.epoch = e;
            for (std::size_t k = 0; k < traces.size(); ++k) {
                const auto& rows = traces[k]->rows;
                const TraceRow& src = e < rows.size() ? rows[e] : rows.back();
                if (e >= rows.size()) ++row.padded;
                errors[k] = src.error;
                cpu[k] = src.cpu_seconds;
            }
            row.median = median(errors);
            row.min = *std::min_element(errors.begin(), errors.end());
            row.max = *std::max_element(errors.begin(), errors.end());
            row.cpu_median = median(cpu);
            band.rows.push_back(row);
        }
        bands.push_back(std::move(band));
    }
    return bands;
}

std::vector<std::string> preset_names() {
    return {"fig1", "fig2", "fig3a", "fig3b", "figd", "fig4"};
}

Preset make_preset(const std::string& name, std::uint64_t seed, std::size_t row_blocks,
                   std::size_t col_blocks) {
    const std::size_t p_row = row_blocks > 0 ? row_blocks : 30;
    const std::size_t p_col = col_blocks > 0 ? col_blocks : 10;
    const MethodSetup rek{"rek", Method::REK};
    const MethodSetup dbl{"double", Method::DoubleBlock, p_row, p_col};
    const MethodSetup bcd{"blockcd", Method::BlockCD, 0, p_col};
    const MethodSetup blk{"block", Method::BlockKaczmarz, p_row, 0};

    Preset p;
    p.name = name;
    p.problem.seed = seed;
    p.stop = StopRule{300, 1e-6, StopCriterion::OracleError};
    if (name == "fig1") {
        p.problem.kind = ProblemKind::GaussianRowStd;
        p.methods = {rek, dbl};
    } else if (name == "fig2") {
        p.problem.kind = ProblemKind::GaussianRowStd;
        p.methods = {rek, bcd};
    } else if (name == "fig3a") {
        p.problem.kind = ProblemKind::GaussianInconsistent;
        p.problem.residual_norm = 0.5;
        p.methods = {rek, dbl, blk};
    } else if (name == "fig3b") {
        p.problem.kind = ProblemKind::GaussianInconsistent;
        p.problem.residual_norm = 0.5;
        p.methods = {rek, bcd, blk};
    } else if (name == "figd") {
        p.problem.kind = ProblemKind::GaussianDynamicRows;
        p.problem.residual_norm = 0.5;
        MethodSetup std_bcd = bcd;
        std_bcd.standardize_columns = true;
        p.methods = {rek, std_bcd};
    } else if (name == "fig4") {
        p.problem.kind = ProblemKind::Tomography;
        p.problem.n = p.problem.tomo_oversampling * p.problem.tomo_grid * p.problem.tomo_grid;
        p.problem.d = p.problem.tomo_grid * p.problem.tomo_grid;
        p.stop.max_epochs = 100;
        if (col_blocks > 0) {
            p.methods = {bcd};
        } else {
            for (std::size_t q : {5, 10, 20, 40}) {
                p.methods.push_back(
                    MethodSetup{"blockcd_q" + std::to_string(q), Method::BlockCD, 0, q});
            }
        }
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return p;
}

}  // namespace rbk
