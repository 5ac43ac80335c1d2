#include "rbk/harness.hpp"
#include "rbk/theory.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rbk {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void write_trace_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "method,trial,epoch,error_l2,residual_l2,z_error_l2,cpu_seconds\n";
    for (const auto& r : records) {
        for (const auto& row : r.trace.rows) {
            out << r.method << ',' << r.trial << ',' << row.epoch << ',' << format_double(row.error)
                << ',' << format_double(row.residual) << ',' << format_double(row.z_error) << ','
                << format_double(row.cpu_seconds) << '\n';
        }
    }
    finish(out, path);
}

void write_bands_csv(const std::vector<Band>& bands, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "method,epoch,median,min,max\n";
    for (const auto& band : bands) {
        for (const auto& row : band.rows) {
            out << band.method << ',' << row.epoch << ',' << format_double(row.median) << ','
                << format_double(row.min) << ',' << format_double(row.max) << '\n';
        }
    }
    finish(out, path);
}

namespace {

double safe_sqrt_bound(double v) {
    return std::isfinite(v) && v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
}

/// Bound evaluator for one column, as a function of the iteration count.
struct EnvelopeColumn {
    std::string name;
    std::size_t iterations_per_epoch = 1;
    std::function<double(std::size_t)> value;  // l2 scale
};

std::vector<EnvelopeColumn> columns_for(const LinearSystem& sys, const MethodSetup& setup,
                                        std::uint64_t master_seed) {
    const MethodConfig config = make_config(sys, setup, master_seed);
    const std::size_t p_row = config.row_partition ? config.row_partition->size() : 1;
    const std::size_t p_col = config.col_partition ? config.col_partition->size() : 1;
    const std::size_t per_epoch = epoch_length(setup.method, sys.rows(), sys.cols(), p_row, p_col);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double x_ls_sq = sys.x_ls.squaredNorm();
    const double b_range_sq = sys.b_range.squaredNorm();
    const SpectralSummary& s = sys.spectral;
    std::vector<EnvelopeColumn> cols;
    auto add = [&](const std::string& suffix, std::function<double(std::size_t)> f) {
        cols.push_back(EnvelopeColumn{setup.tag + "_" + suffix, per_epoch, std::move(f)});
    };

    switch (setup.method) {
        case Method::RK: {
            const double k = s.scaled_condition;
            add("rk_rate", [=](std::size_t j) { return safe_sqrt_bound(rk_bound(j, k, x_ls_sq)); });
            const double radius = rk_horizon(sys);
            add("rk_horizon", [=](std::size_t) { return radius; });
            break;
        }
        case Method::REK: {
            const double k = s.scaled_condition;
            const double b_sq = sys.b.squaredNorm();
            const double smin = s.sigma_min_nonzero;
            add("rek_bound", [=](std::size_t j) {
                return safe_sqrt_bound(rek_bound(j, k, x_ls_sq, b_sq, smin));
            });
            break;
        }
        case Method::BlockKaczmarz: {
            const double floor = safe_sqrt_bound(block_horizon(sys));
            add("block_horizon", [=](std::size_t) { return floor; });
            break;
        }
        case Method::DoubleBlock: {
            if (!config.col_partition) break;
            const PavingParams rows = paving_bounds(sys.a, *config.row_partition);
            const PavingParams colp = paving_bounds(sys.a, *config.col_partition);
            const RateConstants c = rate_constants(sys, rows, colp);
            add("lemma1", [=](std::size_t t) {
                return safe_sqrt_bound(lemma1_envelope(t, c.gamma_col, b_range_sq));
            });
            add("theorem1", [=](std::size_t t) {
                try {
                    return safe_sqrt_bound(theorem1_bound(t, c, x_ls_sq));
                } catch (const std::domain_error&) {
                    return nan;
                }
            });
            break;
        }
        case Method::BlockCD: {
            double gamma_col = 1.0;
            if (setup.standardize_columns) {
                const DenseMatrix a_bar = column_standardize(sys.a).matrix;
                gamma_col = paving_rate(spectral_summary(a_bar).sigma_min_nonzero,
                                        paving_bounds(a_bar, *config.col_partition));
            } else {
                gamma_col = paving_rate(s.sigma_min_nonzero,
                                        paving_bounds(sys.a, *config.col_partition));
            }
            const double kappa = s.condition;
            add("theorem2", [=](std::size_t t) {
                return safe_sqrt_bound(theorem2_bound(t, gamma_col, b_range_sq));
            });
            add("corollary2", [=](std::size_t t) {
                return safe_sqrt_bound(corollary2_bound(t, gamma_col, kappa, x_ls_sq));
            });
            break;
        }
    }
    return cols;
}

}  // namespace

EnvelopeTable envelope_table(const LinearSystem& system, const std::vector<MethodSetup>& methods,
                             std::uint64_t master_seed, std::size_t epochs) {
    std::vector<EnvelopeColumn> cols;
    for (const auto& m : methods) {
        auto more = columns_for(system, m, master_seed);
        std::move(more.begin(), more.end(), std::back_inserter(cols));
    }
    EnvelopeTable table;
    for (const auto& c : cols) table.columns.push_back(c.name);
    for (std::size_t e = 0; e <= epochs; ++e) {
        std::vector<double> row;
        row.reserve(cols.size());
        for (const auto& c : cols) row.push_back(c.value(e * c.iterations_per_epoch));
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_envelopes_csv(const EnvelopeTable& table, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "epoch";
    for (const auto& c : table.columns) out << ',' << c;
    out << '\n';
    for (std::size_t e = 0; e < table.rows.size(); ++e) {
        out << e;
        for (double v : table.rows[e]) out << ',' << format_double(v);
        out << '\n';
    }
    finish(out, path);
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

double PlotFrame::px(double x) const {
    const double span = x_max > x_min ? x_max - x_min : 1.0;
    return left + (x - x_min) / span * (width - left - right);
}

double PlotFrame::py(double y) const {
    const double v = log_y ? std::log10(y) : y;
    const double span = y_max > y_min ? y_max - y_min : 1.0;
    return top + (y_max - v) / span * (height - top - bottom);
}

namespace {

constexpr double kLogFloor = 1e-17;

double x_of(const BandRow& r, PlotAxis axis) {
    return axis == PlotAxis::Epoch ? static_cast<double>(r.epoch) : r.cpu_median;
}

double y_clip(double v, bool log_y) {
    return log_y ? std::max(v, kLogFloor) : v;
}

}  // namespace

PlotFrame make_frame(const std::vector<Band>& bands, PlotAxis axis, bool log_y) {
    if (bands.empty()) throw std::invalid_argument("plot: no bands");
    PlotFrame f;
    f.log_y = log_y;
    f.x_min = std::numeric_limits<double>::infinity();
    f.x_max = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& b : bands) {
        if (b.rows.empty()) throw std::invalid_argument("plot: empty band " + b.method);
        for (const auto& r : b.rows) {
            f.x_min = std::min(f.x_min, x_of(r, axis));
            f.x_max = std::max(f.x_max, x_of(r, axis));
            const double ymin = y_clip(r.min, log_y);
            const double ymax = y_clip(r.max, log_y);
            lo = std::min(lo, log_y ? std::log10(ymin) : ymin);
            hi = std::max(hi, log_y ? std::log10(ymax) : ymax);
        }
    }
    if (log_y) {
        lo = std::floor(lo);
        hi = std::ceil(hi);
    }
    if (hi <= lo) hi = lo + 1.0;
    if (f.x_max <= f.x_min) f.x_max = f.x_min + 1.0;
    f.y_min = lo;
    f.y_max = hi;
    return f;
}

std::string render_svg(const std::vector<Band>& bands, PlotAxis axis, bool log_y) {
    const PlotFrame f = make_frame(bands, axis, log_y);
    static constexpr std::array<const char*, 6> colours{"#d62728", "#1f77b4", "#2ca02c",
                                                        "#9467bd", "#ff7f0e", "#8c564b"};
    static constexpr std::array<const char*, 6> dashes{"", "8,4", "2,3", "10,3,2,3", "4,4", "1,2"};
    std::ostringstream svg;
    svg.precision(6);
    svg << std::fixed;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
        << f.height << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const double x0 = f.left;
    const double x1 = f.width - f.right;
    const double y0 = f.top;
    const double y1 = f.height - f.bottom;
    svg << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">"
        << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << (x1 - x0) << "\" height=\""
        << (y1 - y0) << "\"/></g>\n";

    svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    if (log_y) {
        for (double e = f.y_min; e <= f.y_max + 1e-9; e += 1.0) {
            const double y = f.py(std::pow(10.0, e));
            svg << "<line x1=\"" << x0 << "\" y1=\"" << y << "\" x2=\"" << x1 << "\" y2=\"" << y
                << "\" stroke=\"#dddddd\"/>"
                << "<text x=\"" << (x0 - 6) << "\" y=\"" << (y + 4)
                << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
        }
    }
    for (int k = 0; k <= 5; ++k) {
        const double xv = f.x_min + (f.x_max - f.x_min) * k / 5.0;
        const double x = f.px(xv);
        std::ostringstream label;
        label << std::defaultfloat;
        label.precision(4);
        label << xv;
        svg << "<text x=\"" << x << "\" y=\"" << (y1 + 16) << "\" text-anchor=\"middle\">"
            << label.str() << "</text>\n";
    }
    svg << "<text x=\"" << 0.5 * (x0 + x1) << "\" y=\"" << (f.height - 18)
        << "\" text-anchor=\"middle\">"
        << (axis == PlotAxis::Epoch ? "epoch" : "CPU time (s)") << "</text>\n"
        << "<text x=\"18\" y=\"" << 0.5 * (y0 + y1) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << 0.5 * (y0 + y1) << ")\">l2 error</text>\n</g>\n";

    for (std::size_t m = 0; m < bands.size(); ++m) {
        const auto& rows = bands[m].rows;
        const char* colour = colours[m % colours.size()];
        svg << "<polygon fill=\"" << colour << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (const auto& r : rows) svg << f.px(x_of(r, axis)) << ',' << f.py(y_clip(r.max, log_y)) << ' ';
        for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
            svg << f.px(x_of(*it, axis)) << ',' << f.py(y_clip(it->min, log_y)) << ' ';
        }
        svg << "\"/>\n";
        svg << "<polyline class=\"median\" data-method=\"" << bands[m].method << "\" fill=\"none\" stroke=\""
            << colour << "\" stroke-width=\"2\"";
        if (*dashes[m % dashes.size()] != '\0') {
            svg << " stroke-dasharray=\"" << dashes[m % dashes.size()] << "\"";
        }
        svg << " points=\"";
        for (const auto& r : rows) svg << f.px(x_of(r, axis)) << ',' << f.py(y_clip(r.median, log_y)) << ' ';
        svg << "\"/>\n";
        const double ly = y0 + 16.0 + 18.0 * static_cast<double>(m);
        svg << "<line x1=\"" << (x1 + 10) << "\" y1=\"" << ly << "\" x2=\"" << (x1 + 40) << "\" y2=\""
            << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"";
        if (*dashes[m % dashes.size()] != '\0') {
            svg << " stroke-dasharray=\"" << dashes[m % dashes.size()] << "\"";
        }
        svg << "/><text x=\"" << (x1 + 46) << "\" y=\"" << (ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << bands[m].method << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_svg_plot(const std::vector<Band>& bands, const std::string& path, PlotAxis axis,
                    bool log_y) {
    const std::string svg = render_svg(bands, axis, log_y);
    std::ofstream out = open_output(path);
    out << svg;
    finish(out, path);
}

}  // namespace rbk
