#pragma once

// Dense linear algebra substrate: matrices, submatrices, SVD-based
// pseudoinverse application and the exact least-squares oracle.

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbk {

using Vector = Eigen::VectorXd;
using IndexSet = std::vector<std::size_t>;

/// Raised when operand shapes do not conform.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot produce a trustworthy result
/// (non-convergence, non-finite data, degenerate input).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for inconsistent solver or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major dense real matrix with at least one row and one column and
/// finite entries.
class DenseMatrix {
public:
    using Storage = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    DenseMatrix(std::size_t rows, std::size_t cols);
    explicit DenseMatrix(Storage values);

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> entries);

    std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }

    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
    double& operator()(std::size_t i, std::size_t j) { return values_(i, j); }

    auto row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)); }
    auto col(std::size_t j) const { return values_.col(static_cast<Eigen::Index>(j)); }

    const Storage& values() const { return values_; }
    Storage& values() { return values_; }

    DenseMatrix transpose() const;
    double frobenius_norm() const { return values_.norm(); }

    /// Throws NumericalError if any entry is NaN or infinite.
    void check_finite() const;

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
               a.values_ == b.values_;
    }

private:
    Storage values_;
};

Vector make_vector(std::initializer_list<double> entries);

Vector mat_vec(const DenseMatrix& a, const Vector& x);
Vector mat_tvec(const DenseMatrix& a, const Vector& y);

/// Rows of `a` listed by `indices`, in that order.
DenseMatrix row_submatrix(const DenseMatrix& a, const IndexSet& indices);
/// Columns of `a` listed by `indices`, in that order.
DenseMatrix col_submatrix(const DenseMatrix& a, const IndexSet& indices);

/// Entries of `v` listed by `indices`.
Vector gather(const Vector& v, const IndexSet& indices);

inline constexpr double kDefaultRankTolerance = 1e-12;

/// Thin SVD a = U diag(s) V^T with singular values sorted nonincreasing.
struct SvdFactorization {
    DenseMatrix u;
    Vector singular_values;
    DenseMatrix v;
    double rank_tolerance = kDefaultRankTolerance;

    /// Number of singular values above rank_tolerance * sigma_1.
    std::size_t rank() const;
    /// Absolute cutoff below which singular values are treated as zero.
    double cutoff() const;
    std::size_t source_rows() const { return u.rows(); }
    std::size_t source_cols() const { return v.rows(); }
};

SvdFactorization svd(const DenseMatrix& a, double rank_tolerance = kDefaultRankTolerance);

/// V Sigma^+ U^T v, inverting only singular values above the rank cutoff.
Vector pinv_apply(const SvdFactorization& f, const Vector& v);

/// Minimum-norm least-squares solution pinv(a) * b.
Vector least_squares_oracle(const DenseMatrix& a, const Vector& b);
Vector least_squares_oracle(const SvdFactorization& f, const Vector& b);

struct SpectralSummary {
    double sigma_min_nonzero = 0.0;
    double sigma_max = 0.0;
    double frobenius = 0.0;
    double condition = 0.0;         // sigma_max / sigma_min_nonzero
    double scaled_condition = 0.0;  // frobenius / sigma_min_nonzero
    std::size_t rank = 0;
};

SpectralSummary spectral_summary(const DenseMatrix& a);
SpectralSummary spectral_summary(const SvdFactorization& f);

// Plain-text matrix/vector files. Matrix: "n d" then n lines of d values.
// Vector: "n" then n values. Values are written with 17 significant digits.
DenseMatrix read_matrix(std::istream& in);
Vector read_vector(std::istream& in);
void write_matrix(std::ostream& out, const DenseMatrix& a);
void write_vector(std::ostream& out, const Vector& v);

DenseMatrix read_matrix_file(const std::string& path);
Vector read_vector_file(const std::string& path);
void write_matrix_file(const std::string& path, const DenseMatrix& a);
void write_vector_file(const std::string& path, const Vector& v);

}  // namespace rbk
