// Command-line front end: solve, pave-check, experiment, generate.

#include "rbk/harness.hpp"
#include "rbk/theory.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

namespace {

using namespace rbk;

struct SolveArgs {
    std::string matrix;
    std::string rhs;
    std::string method = "double";
    std::size_t row_blocks = 0;
    std::size_t col_blocks = 0;
    std::uint64_t seed = 0;
    std::size_t max_epochs = 100;
    double tol = 1e-6;
    std::string trace;
    bool standardize_columns = false;
    bool hybrid = false;
};

int cmd_solve(const SolveArgs& args) {
    LinearSystem system = make_system(read_matrix_file(args.matrix), read_vector_file(args.rhs));
    MethodSetup setup;
    setup.method = parse_method(args.method);
    setup.tag = std::string(method_tag(setup.method));
    setup.row_blocks = args.row_blocks;
    setup.col_blocks = args.col_blocks;
    setup.standardize_columns = args.standardize_columns;
    setup.hybrid_projection = args.hybrid;
    const MethodConfig config = make_config(system, setup, args.seed);
    const StopRule stop{args.max_epochs, args.tol, StopCriterion::OracleError};
    const Trace trace = PreparedSolver(system, config).run(stop, trial_seed(args.seed, setup.tag, 0));
    if (!args.trace.empty()) {
        write_trace_csv({ExperimentRecord{0, setup.tag, trace}}, args.trace);
    }
    const TraceRow& last = trace.rows.back();
    std::cout << "method " << setup.tag << "\nepochs " << last.epoch << "\niterations "
              << last.iteration << "\nerror " << format_double(last.error) << "\nresidual "
              << format_double(last.residual) << "\nconverged " << (trace.converged ? "yes" : "no")
              << '\n';
    return 0;
}

int cmd_pave_check(const std::string& matrix, std::size_t blocks, const std::string& axis,
                   std::uint64_t seed) {
    const DenseMatrix a = read_matrix_file(matrix);
    const Axis ax = axis == "rows" ? Axis::Rows : Axis::Columns;
    Rng rng(seed);
    const Partition p = random_partition(ax == Axis::Rows ? a.rows() : a.cols(), blocks, rng, ax);
    const PavingParams params = paving_bounds(a, p);
    std::cout << params.p << ' ' << format_double(params.alpha) << ' ' << format_double(params.beta)
              << '\n';
    return 0;
}

struct ExperimentArgs {
    std::string preset;
    std::uint64_t seed = 0;
    std::size_t trials = 40;
    std::string out;
    std::size_t max_epochs = 0;
    double tol = 0.0;
    std::size_t row_blocks = 0;
    std::size_t col_blocks = 0;
    unsigned threads = 1;
};

int cmd_experiment(const ExperimentArgs& args) {
    std::string out = args.out;
    if (out.empty()) {
        const char* env = std::getenv("RBK_OUT_DIR");
        out = env != nullptr && *env != '\0' ? env : ".";
    }
    std::filesystem::create_directories(out);
    Preset preset = make_preset(args.preset, args.seed, args.row_blocks, args.col_blocks);
    if (args.max_epochs > 0) preset.stop.max_epochs = args.max_epochs;
    if (args.tol > 0.0) preset.stop.error_threshold = args.tol;

    const LinearSystem system = generate(preset.problem);
    std::cerr << "preset " << preset.name << ": " << system.rows() << " x " << system.cols()
              << ", kappa " << system.spectral.condition << ", residual "
              << system.b_perp.norm() << '\n';
    const auto records =
        run_experiment(system, args.seed, preset.methods, args.trials, preset.stop, args.threads);
    const auto bands = aggregate_bands(records);
    const std::filesystem::path dir(out);
    write_trace_csv(records, (dir / "trace.csv").string());
    write_bands_csv(bands, (dir / "bands.csv").string());
    write_svg_plot(bands, (dir / "bands_epoch.svg").string(), PlotAxis::Epoch);
    write_svg_plot(bands, (dir / "bands_cpu.svg").string(), PlotAxis::CpuSeconds);
    std::size_t epochs = 0;
    for (const auto& b : bands) epochs = std::max(epochs, b.rows.back().epoch);
    write_envelopes_csv(envelope_table(system, preset.methods, args.seed, epochs),
                        (dir / "envelopes.csv").string());

    for (const auto& b : bands) {
        const BandRow& last = b.rows.back();
        std::size_t converged = 0;
        for (const auto& r : records) {
            if (r.method == b.method && r.trace.converged) ++converged;
        }
        std::cout << b.method << ": epochs " << last.epoch << ", median error "
                  << format_double(last.median) << ", converged " << converged << '/'
                  << args.trials << '\n';
    }
    return 0;
}

int cmd_generate(const std::string& kind, std::size_t n, std::size_t d, double residual,
                 std::size_t grid, std::size_t oversampling, std::uint64_t seed,
                 const std::string& matrix, const std::string& rhs) {
    ProblemSpec spec;
    spec.seed = seed;
    spec.n = n;
    spec.d = d;
    spec.residual_norm = residual;
    spec.tomo_grid = grid;
    spec.tomo_oversampling = oversampling;
    if (kind == "gaussian") {
        spec.kind = ProblemKind::GaussianRowStd;
    } else if (kind == "inconsistent") {
        spec.kind = ProblemKind::GaussianInconsistent;
    } else if (kind == "dynamic") {
        spec.kind = ProblemKind::GaussianDynamicRows;
    } else {
        spec.kind = ProblemKind::Tomography;
    }
    const LinearSystem system = generate(spec);
    write_matrix_file(matrix, system.a);
    write_vector_file(rhs, system.b);
    std::cout << system.rows() << ' ' << system.cols() << " kappa "
              << format_double(system.spectral.condition) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized block Kaczmarz solvers and experiments"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve a least-squares system from files");
    s->add_option("--matrix", solve.matrix, "Matrix file")->required()->check(CLI::ExistingFile);
    s->add_option("--rhs", solve.rhs, "Right-hand side file")->required()->check(CLI::ExistingFile);
    s->add_option("--method", solve.method, "rk|rek|block|double|blockcd")
        ->check(CLI::IsMember({"rk", "rek", "block", "double", "blockcd"}));
    s->add_option("--row-blocks", solve.row_blocks, "Row blocks");
    s->add_option("--col-blocks", solve.col_blocks, "Column blocks");
    s->add_option("--seed", solve.seed, "Seed");
    s->add_option("--max-epochs", solve.max_epochs, "Epoch budget");
    s->add_option("--tol", solve.tol, "Error threshold")->check(CLI::PositiveNumber);
    s->add_option("--trace", solve.trace, "Per-epoch CSV output");
    s->add_flag("--standardize-columns", solve.standardize_columns,
                "blockcd: iterate on the column-standardized matrix");
    s->add_flag("--hybrid", solve.hybrid, "double: single-column z step");

    std::string pave_matrix;
    std::size_t pave_blocks = 1;
    std::string pave_axis = "rows";
    std::uint64_t pave_seed = 0;
    auto* pc = app.add_subcommand("pave-check", "Measure paving bounds of a random partition");
    pc->add_option("--matrix", pave_matrix, "Matrix file")->required()->check(CLI::ExistingFile);
    pc->add_option("--blocks", pave_blocks, "Block count")->required();
    pc->add_option("--axis", pave_axis, "rows|cols")->check(CLI::IsMember({"rows", "cols"}));
    pc->add_option("--seed", pave_seed, "Seed");

    ExperimentArgs exp;
    auto* ex = app.add_subcommand("experiment", "Run a multi-trial preset");
    ex->add_option("--preset", exp.preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));
    ex->add_option("--seed", exp.seed, "Master seed");
    ex->add_option("--trials", exp.trials, "Trials per method")->check(CLI::PositiveNumber);
    ex->add_option("--out", exp.out, "Output directory (default: $RBK_OUT_DIR or .)");
    ex->add_option("--max-epochs", exp.max_epochs, "Override the preset epoch budget");
    ex->add_option("--tol", exp.tol, "Override the preset error threshold");
    ex->add_option("--row-blocks", exp.row_blocks, "Row blocks");
    ex->add_option("--col-blocks", exp.col_blocks, "Column blocks");
    ex->add_option("--threads", exp.threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string gen_kind = "gaussian";
    std::size_t gen_n = 300;
    std::size_t gen_d = 100;
    double gen_residual = 0.5;
    std::size_t gen_grid = 20;
    std::size_t gen_f = 3;
    std::uint64_t gen_seed = 0;
    std::string gen_matrix;
    std::string gen_rhs;
    auto* g = app.add_subcommand("generate", "Write a generated test problem to files");
    g->add_option("--kind", gen_kind, "gaussian|inconsistent|dynamic|tomography")
        ->check(CLI::IsMember({"gaussian", "inconsistent", "dynamic", "tomography"}));
    g->add_option("--n", gen_n, "Rows");
    g->add_option("--d", gen_d, "Columns");
    g->add_option("--residual", gen_residual, "Residual norm for inconsistent kinds");
    g->add_option("--grid", gen_grid, "Tomography grid size N");
    g->add_option("--oversampling", gen_f, "Tomography oversampling f");
    g->add_option("--seed", gen_seed, "Seed");
    g->add_option("--matrix", gen_matrix, "Matrix output file")->required();
    g->add_option("--rhs", gen_rhs, "Right-hand side output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (s->parsed()) return cmd_solve(solve);
        if (pc->parsed()) return cmd_pave_check(pave_matrix, pave_blocks, pave_axis, pave_seed);
        if (ex->parsed()) return cmd_experiment(exp);
        if (g->parsed()) {
            return cmd_generate(gen_kind, gen_n, gen_d, gen_residual, gen_grid, gen_f, gen_seed,
                                gen_matrix, gen_rhs);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
