#pragma once

// Closed-form convergence envelopes. All "bound" functions return bounds on
// expected squared errors unless noted otherwise.

#include "rbk/core.hpp"
#include "rbk/paving.hpp"
#include "rbk/system.hpp"

#include <cstddef>
#include <optional>

namespace rbk {

/// gamma_row = 1 - sigma_min^2 / (p beta) for the row paving, gamma_col the
/// same for the column paving.
struct RateConstants {
    double gamma_row = 1.0;
    double gamma_col = 1.0;
    double alpha_row = 0.0;
    double b_range_norm = 0.0;
    double b_perp_norm = 0.0;
    double sigma_min = 0.0;
};

/// 1 - sigma_min^2 / (p beta).
double paving_rate(double sigma_min, const PavingParams& paving);

RateConstants rate_constants(const LinearSystem& system, const PavingParams& row_paving,
                             const PavingParams& col_paving);

/// gamma^T x0 + (gamma^floor(T/2) + gamma_bar^floor(T/2)) B / (1 - gamma).
double lemma_recursion_bound(std::size_t t, double gamma, double gamma_bar, double b,
                             double x0_err_sq);

/// Double-block envelope for E||x_T - x_LS||^2: the recursion bound with
/// B = ||b_R||^2 / alpha.
double theorem1_bound(std::size_t t, const RateConstants& c, double x0_err_sq);

/// gamma_bar^k ||b_R||^2, envelope for E||z_k - b_perp||^2.
double lemma1_envelope(std::size_t k, double gamma_bar, double b_range_norm_sq);

/// REK: (1 - 1/K^2)^(j/2) (||x_LS||^2 + 2 ||b||^2 / sigma_min^2).
double rek_bound(std::size_t j, double scaled_condition, double x_ls_norm_sq, double b_norm_sq,
                 double sigma_min);

/// Plain RK: (1 - 1/R)^j ||x_0 - x_*||^2 with R = K^2 (consistent systems).
double rk_bound(std::size_t j, double scaled_condition, double x0_err_sq);

/// Plain RK noise radius sqrt(R) max_i |e_i| / ||a_i|| with e = b - A x_LS.
/// This is a bound on E||x - x_*|| (not squared).
double rk_horizon(const LinearSystem& system);

/// Block Kaczmarz noise floor 3 ||e||^2 / sigma_min^2 (squared units).
double block_horizon(const LinearSystem& system);

/// gamma from the measured paving of a row-standardized matrix.
double corollary1_gamma(const DenseMatrix& a_std, const PavingParams& paving);

/// Reference rate 1 - c / (kappa^2 log(1 + n)) for a caller-chosen constant c.
double corollary1_reference_gamma(double c, double kappa, std::size_t n);

struct TransportedPaving {
    double gamma = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
    double a_min = 0.0;  // smallest squared row norm
    double a_max = 0.0;  // largest squared row norm
};

/// Paving of the row-standardized matrix reused on the unstandardized A.
/// Without `delta` the measured (alpha_std, beta_std) are transported as
/// (a_min alpha_std, a_max beta_std); with `delta` the worst case
/// (a_min (1 - delta), a_max (1 + delta)) is used. gamma uses sigma_min(A).
TransportedPaving dynamic_range_gamma(const DenseMatrix& a, std::optional<double> delta,
                                      const PavingParams& paving_std);

/// gamma_bar^T ||b_R||^2, envelope for E||A (x_LS - x_T)||^2.
double theorem2_bound(std::size_t t, double gamma_col, double b_range_norm_sq);

/// Full-rank envelope for E||x_LS - x_T||^2: gamma_bar^T kappa^2 ||x_LS||^2.
/// For the column-standardized variant pass gamma_bar of A D and kappa of A;
/// the bound then covers E||x_LS - D x_T||^2.
double corollary2_bound(std::size_t t, double gamma_col, double kappa, double x_ls_norm_sq);

}  // namespace rbk
