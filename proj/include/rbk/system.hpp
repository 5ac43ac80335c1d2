#pragma once

#include "rbk/core.hpp"

namespace rbk {

/// A least-squares problem together with its exact SVD-derived oracle data.
struct LinearSystem {
    DenseMatrix a;
    Vector b;
    Vector x_ls;     // pinv(A) b
    SpectralSummary spectral;
    Vector b_range;  // A pinv(A) b
    Vector b_perp;   // (I - A pinv(A)) b

    std::size_t rows() const { return a.rows(); }
    std::size_t cols() const { return a.cols(); }
};

LinearSystem make_system(DenseMatrix a, Vector b);

}  // namespace rbk
