#pragma once

// Test-problem generators, multi-trial experiments and their reports.

#include "rbk/core.hpp"
#include "rbk/paving.hpp"
#include "rbk/random.hpp"
#include "rbk/solvers.hpp"
#include "rbk/system.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rbk {

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Gaussian matrix with unit rows, planted Gaussian x, b = A x.
LinearSystem gen_gaussian_rowstd(std::size_t n, std::size_t d, Rng& rng);

/// Unit-row Gaussian matrix with b = A x* + e, e in range(A)^perp and
/// ||e|| = residual_norm, so x_LS = x*.
LinearSystem gen_inconsistent(std::size_t n, std::size_t d, double residual_norm, Rng& rng);

/// Gaussian matrix whose i-th row (0-based) has norm i + 1, with an
/// inconsistent right-hand side built as in gen_inconsistent.
LinearSystem gen_dynamic_rows(std::size_t n, std::size_t d, double residual_norm, Rng& rng);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Intersection lengths of the segment p0-p1 with the unit pixels of the
/// square [0, N]^2. Pixel (r, c) covers [c, c+1] x [r, r+1] and has index
/// r * N + c.
Vector ray_intersections(std::size_t grid, Point2 p0, Point2 p1);

/// Smooth radial bump on the N x N grid with maximum 1.
Vector tomography_phantom(std::size_t grid);

/// f N^2 random lines through an N x N grid; each line joins uniform points
/// on two distinct sides of the square. b = A * phantom.
LinearSystem gen_tomography(std::size_t grid, std::size_t oversampling, Rng& rng);

enum class ProblemKind { GaussianRowStd, GaussianInconsistent, GaussianDynamicRows, Tomography };

struct ProblemSpec {
    ProblemKind kind = ProblemKind::GaussianRowStd;
    std::size_t n = 300;
    std::size_t d = 100;
    double residual_norm = 0.0;
    std::size_t tomo_grid = 20;
    std::size_t tomo_oversampling = 3;
    std::uint64_t seed = 0;
};

LinearSystem generate(const ProblemSpec& spec);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct MethodSetup {
    std::string tag;
    Method method = Method::DoubleBlock;
    std::size_t row_blocks = 0;
    std::size_t col_blocks = 0;
    bool standardize_columns = false;
    bool hybrid_projection = false;
};

/// Attaches partitions derived from `master_seed` and the block counts, so
/// every setup with the same counts shares the same partition.
MethodConfig make_config(const LinearSystem& system, const MethodSetup& setup,
                         std::uint64_t master_seed);

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& tag, std::size_t trial);

struct ExperimentRecord {
    std::size_t trial = 0;
    std::string method;
    Trace trace;
};

/// Runs `trials` seeded runs of each setup on one system. `threads` > 1
/// spreads trials over worker threads; the result does not depend on it
/// apart from cpu_seconds.
std::vector<ExperimentRecord> run_experiment(const LinearSystem& system, std::uint64_t master_seed,
                                             const std::vector<MethodSetup>& methods,
                                             std::size_t trials, const StopRule& stop,
                                             unsigned threads = 1);

std::vector<ExperimentRecord> run_experiment(const ProblemSpec& spec,
                                             const std::vector<MethodSetup>& methods,
                                             std::size_t trials, const StopRule& stop,
                                             unsigned threads = 1);

struct BandRow {
    std::size_t epoch = 0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double cpu_median = 0.0;
    std::size_t padded = 0;  // trials that had already stopped and were carried forward
};

struct Band {
    std::string method;
    std::vector<BandRow> rows;
};

/// Per-method median/min/max of the error over trials on a common epoch grid.
std::vector<Band> aggregate_bands(const std::vector<ExperimentRecord>& records);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct Preset {
    std::string name;
    ProblemSpec problem;
    std::vector<MethodSetup> methods;
    StopRule stop;
};

/// fig1, fig2, fig3a, fig3b, figd, fig4. Nonzero block counts override the
/// defaults of 30 row blocks and 10 column blocks.
Preset make_preset(const std::string& name, std::uint64_t seed, std::size_t row_blocks = 0,
                   std::size_t col_blocks = 0);

std::vector<std::string> preset_names();

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

void write_trace_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
void write_bands_csv(const std::vector<Band>& bands, const std::string& path);

struct EnvelopeTable {
    std::vector<std::string> columns;           // excluding the leading epoch column
    std::vector<std::vector<double>> rows;      // rows[epoch][column]
};

/// Theory envelopes for each setup on the l2-error scale: the square root of
/// each bound on an expected squared error, which by Jensen bounds the mean
/// l2 error. Bounds that are vacuous for the given pavings are NaN.
EnvelopeTable envelope_table(const LinearSystem& system, const std::vector<MethodSetup>& methods,
                             std::uint64_t master_seed, std::size_t epochs);
void write_envelopes_csv(const EnvelopeTable& table, const std::string& path);

enum class PlotAxis { Epoch, CpuSeconds };

/// Data-to-pixel transform used by the SVG renderer.
struct PlotFrame {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;  // log10 units when log_y
    bool log_y = true;
    double width = 720.0, height = 460.0;
    double left = 80.0, right = 160.0, top = 30.0, bottom = 60.0;

    double px(double x) const;
    double py(double y) const;
};

PlotFrame make_frame(const std::vector<Band>& bands, PlotAxis axis, bool log_y);
std::string render_svg(const std::vector<Band>& bands, PlotAxis axis, bool log_y);
void write_svg_plot(const std::vector<Band>& bands, const std::string& path, PlotAxis axis,
                    bool log_y = true);

/// 17 significant digits, "nan" for NaN.
std::string format_double(double v);

}  // namespace rbk
