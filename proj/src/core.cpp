#include "rbk/core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace rbk {

namespace {

std::string shape(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

void check_indices(const IndexSet& indices, std::size_t bound, const char* what) {
    if (indices.empty()) {
        throw DimensionError(std::string(what) + ": empty index set");
    }
    for (std::size_t i : indices) {
        if (i >= bound) {
            throw DimensionError(std::string(what) + ": index " + std::to_string(i) +
                                 " out of range [0, " + std::to_string(bound) + ")");
        }
    }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : values_(Storage::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols))) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("DenseMatrix: empty shape " + shape(rows, cols));
    }
}

DenseMatrix::DenseMatrix(Storage values) : values_(std::move(values)) {
    if (values_.rows() == 0 || values_.cols() == 0) {
        throw DimensionError("DenseMatrix: empty shape " +
                             shape(static_cast<std::size_t>(values_.rows()),
                                   static_cast<std::size_t>(values_.cols())));
    }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    const std::size_t d = n == 0 ? 0 : rows.begin()->size();
    DenseMatrix m(n, d);
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != d) {
            throw DimensionError("DenseMatrix::from_rows: ragged rows");
        }
        std::size_t j = 0;
        for (double v : r) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    m.values_.setIdentity();
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> entries) {
    DenseMatrix m(entries.size(), entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        m(i, i) = entries[i];
    }
    return m;
}

DenseMatrix DenseMatrix::transpose() const {
    return DenseMatrix(Storage(values_.transpose()));
}

void DenseMatrix::check_finite() const {
    if (!values_.allFinite()) {
        throw NumericalError("DenseMatrix: non-finite entry");
    }
}

Vector make_vector(std::initializer_list<double> entries) {
    Vector v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index i = 0;
    for (double e : entries) {
        v(i++) = e;
    }
    return v;
}

Vector mat_vec(const DenseMatrix& a, const Vector& x) {
    if (static_cast<std::size_t>(x.size()) != a.cols()) {
        throw DimensionError("mat_vec: matrix " + shape(a.rows(), a.cols()) +
                             " times vector of length " + std::to_string(x.size()));
    }
    return a.values() * x;
}

Vector mat_tvec(const DenseMatrix& a, const Vector& y) {
    if (static_cast<std::size_t>(y.size()) != a.rows()) {
        throw DimensionError("mat_tvec: transpose of " + shape(a.rows(), a.cols()) +
                             " times vector of length " + std::to_string(y.size()));
    }
    return a.values().transpose() * y;
}

DenseMatrix row_submatrix(const DenseMatrix& a, const IndexSet& indices) {
    check_indices(indices, a.rows(), "row_submatrix");
    DenseMatrix out(indices.size(), a.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        out.values().row(static_cast<Eigen::Index>(r)) = a.row(indices[r]);
    }
    return out;
}

DenseMatrix col_submatrix(const DenseMatrix& a, const IndexSet& indices) {
    check_indices(indices, a.cols(), "col_submatrix");
    DenseMatrix out(a.rows(), indices.size());
    for (std::size_t c = 0; c < indices.size(); ++c) {
        out.values().col(static_cast<Eigen::Index>(c)) = a.col(indices[c]);
    }
    return out;
}

Vector gather(const Vector& v, const IndexSet& indices) {
    Vector out(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= static_cast<std::size_t>(v.size())) {
            throw DimensionError("gather: index out of range");
        }
        out(static_cast<Eigen::Index>(k)) = v(static_cast<Eigen::Index>(indices[k]));
    }
    return out;
}

std::size_t SvdFactorization::rank() const {
    const double c = cutoff();
    return static_cast<std::size_t>((singular_values.array() > c).count());
}

double SvdFactorization::cutoff() const {
    if (singular_values.size() == 0) {
        return 0.0;
    }
    return rank_tolerance * singular_values(0);
}

SvdFactorization svd(const DenseMatrix& a, double rank_tolerance) {
    if (!(rank_tolerance >= 0.0 && rank_tolerance < 1.0)) {
        throw std::invalid_argument("svd: rank_tolerance must lie in [0, 1)");
    }
    a.check_finite();
    Eigen::MatrixXd dense = a.values();
    Eigen::BDCSVD<Eigen::MatrixXd> dec(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        throw NumericalError("svd: decomposition of " + shape(a.rows(), a.cols()) +
                             " matrix did not converge");
    }
    SvdFactorization f{DenseMatrix(DenseMatrix::Storage(dec.matrixU())), dec.singularValues(),
                       DenseMatrix(DenseMatrix::Storage(dec.matrixV())), rank_tolerance};
    if (!f.singular_values.allFinite() || !f.u.values().allFinite() ||
        !f.v.values().allFinite()) {
        throw NumericalError("svd: non-finite factor");
    }
    return f;
}

Vector pinv_apply(const SvdFactorization& f, const Vector& v) {
    if (static_cast<std::size_t>(v.size()) != f.u.rows()) {
        throw DimensionError("pinv_apply: factorization of a " +
                             shape(f.u.rows(), f.v.rows()) + " matrix applied to length " +
                             std::to_string(v.size()));
    }
    const std::size_t r = f.rank();
    if (r == 0) {
        return Vector::Zero(static_cast<Eigen::Index>(f.v.rows()));
    }
    const auto ri = static_cast<Eigen::Index>(r);
    Vector coeffs = f.u.values().leftCols(ri).transpose() * v;
    coeffs.array() /= f.singular_values.head(ri).array();
    return f.v.values().leftCols(ri) * coeffs;
}

Vector least_squares_oracle(const SvdFactorization& f, const Vector& b) {
    return pinv_apply(f, b);
}

Vector least_squares_oracle(const DenseMatrix& a, const Vector& b) {
    if (static_cast<std::size_t>(b.size()) != a.rows()) {
        throw DimensionError("least_squares_oracle: matrix " + shape(a.rows(), a.cols()) +
                             " with right-hand side of length " + std::to_string(b.size()));
    }
    return pinv_apply(svd(a), b);
}

SpectralSummary spectral_summary(const SvdFactorization& f) {
    const std::size_t r = f.rank();
    if (r == 0 || f.singular_values(0) == 0.0) {
        throw NumericalError("spectral_summary: zero matrix");
    }
    SpectralSummary s;
    s.rank = r;
    s.sigma_max = f.singular_values(0);
    s.sigma_min_nonzero = f.singular_values(static_cast<Eigen::Index>(r - 1));
    s.frobenius = f.singular_values.norm();
    s.condition = s.sigma_max / s.sigma_min_nonzero;
    s.scaled_condition = s.frobenius / s.sigma_min_nonzero;
    return s;
}

SpectralSummary spectral_summary(const DenseMatrix& a) {
    return spectral_summary(svd(a));
}

}  // namespace rbk
