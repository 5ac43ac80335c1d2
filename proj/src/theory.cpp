#include "rbk/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rbk {

namespace {

double ipow(double base, std::size_t e) {
    return std::pow(base, static_cast<double>(e));
}

void require_rate(double gamma, const char* name) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::domain_error(std::string(name) + " = " + std::to_string(gamma) +
                                " is outside [0, 1); the bound is vacuous");
    }
}

}  // namespace

double paving_rate(double sigma_min, const PavingParams& paving) {
    if (paving.p == 0 || !(paving.beta > 0.0)) {
        throw std::domain_error("paving_rate: paving with p = 0 or beta = 0");
    }
    return 1.0 - sigma_min * sigma_min / (static_cast<double>(paving.p) * paving.beta);
}

RateConstants rate_constants(const LinearSystem& system, const PavingParams& row_paving,
                             const PavingParams& col_paving) {
    RateConstants c;
    c.sigma_min = system.spectral.sigma_min_nonzero;
    c.gamma_row = paving_rate(c.sigma_min, row_paving);
    c.gamma_col = paving_rate(c.sigma_min, col_paving);
    c.alpha_row = row_paving.alpha;
    c.b_range_norm = system.b_range.norm();
    c.b_perp_norm = system.b_perp.norm();
    return c;
}

double lemma_recursion_bound(std::size_t t, double gamma, double gamma_bar, double b,
                             double x0_err_sq) {
    require_rate(gamma, "gamma");
    require_rate(gamma_bar, "gamma_bar");
    const std::size_t half = t / 2;
    return ipow(gamma, t) * x0_err_sq + (ipow(gamma, half) + ipow(gamma_bar, half)) * b / (1.0 - gamma);
}

double theorem1_bound(std::size_t t, const RateConstants& c, double x0_err_sq) {
    if (!(c.alpha_row > 0.0)) {
        throw std::domain_error("theorem1_bound: lower row paving bound alpha is zero");
    }
    const double b = c.b_range_norm * c.b_range_norm / c.alpha_row;
    return lemma_recursion_bound(t, c.gamma_row, c.gamma_col, b, x0_err_sq);
}

double lemma1_envelope(std::size_t k, double gamma_bar, double b_range_norm_sq) {
    return ipow(gamma_bar, k) * b_range_norm_sq;
}

double rek_bound(std::size_t j, double scaled_condition, double x_ls_norm_sq, double b_norm_sq,
                 double sigma_min) {
    if (!(scaled_condition >= 1.0)) {
        throw std::domain_error("rek_bound: scaled condition number below 1");
    }
    const double rate = 1.0 - 1.0 / (scaled_condition * scaled_condition);
    return std::pow(rate, 0.5 * static_cast<double>(j)) *
           (x_ls_norm_sq + 2.0 * b_norm_sq / (sigma_min * sigma_min));
}

double rk_bound(std::size_t j, double scaled_condition, double x0_err_sq) {
    if (!(scaled_condition >= 1.0)) {
        throw std::domain_error("rk_bound: scaled condition number below 1");
    }
    return ipow(1.0 - 1.0 / (scaled_condition * scaled_condition), j) * x0_err_sq;
}

double rk_horizon(const LinearSystem& system) {
    const Vector e = system.b - system.a.values() * system.x_ls;
    double worst = 0.0;
    for (std::size_t i = 0; i < system.rows(); ++i) {
        const double norm = system.a.row(i).norm();
        if (!(norm > 0.0)) {
            throw NumericalError("rk_horizon: zero row " + std::to_string(i));
        }
        worst = std::max(worst, std::abs(e(static_cast<Eigen::Index>(i))) / norm);
    }
    return system.spectral.scaled_condition * worst;
}

double block_horizon(const LinearSystem& system) {
    const Vector e = system.b - system.a.values() * system.x_ls;
    const double s = system.spectral.sigma_min_nonzero;
    return 3.0 * e.squaredNorm() / (s * s);
}

double corollary1_gamma(const DenseMatrix& a_std, const PavingParams& paving) {
    return paving_rate(spectral_summary(a_std).sigma_min_nonzero, paving);
}

double corollary1_reference_gamma(double c, double kappa, std::size_t n) {
    return 1.0 - c / (kappa * kappa * std::log1p(static_cast<double>(n)));
}

TransportedPaving dynamic_range_gamma(const DenseMatrix& a, std::optional<double> delta,
                                      const PavingParams& paving_std) {
    const Eigen::VectorXd sq = a.values().rowwise().squaredNorm();
    TransportedPaving out;
    out.a_min = sq.minCoeff();
    out.a_max = sq.maxCoeff();
    if (!(out.a_min > 0.0)) {
        throw NumericalError("dynamic_range_gamma: zero row");
    }
    if (delta) {
        if (!(*delta >= 0.0 && *delta < 1.0)) {
            throw std::domain_error("dynamic_range_gamma: delta must lie in [0, 1)");
        }
        out.alpha = out.a_min * (1.0 - *delta);
        out.beta = out.a_max * (1.0 + *delta);
    } else {
        out.alpha = out.a_min * paving_std.alpha;
        out.beta = out.a_max * paving_std.beta;
    }
    out.gamma = paving_rate(spectral_summary(a).sigma_min_nonzero,
                            PavingParams{paving_std.p, out.alpha, out.beta});
    return out;
}

double theorem2_bound(std::size_t t, double gamma_col, double b_range_norm_sq) {
    return ipow(gamma_col, t) * b_range_norm_sq;
}

double corollary2_bound(std::size_t t, double gamma_col, double kappa, double x_ls_norm_sq) {
    return ipow(gamma_col, t) * kappa * kappa * x_ls_norm_sq;
}

}  // namespace rbk
