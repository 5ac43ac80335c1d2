#include "rbk/system.hpp"

#include <string>

namespace rbk {

LinearSystem make_system(DenseMatrix a, Vector b) {
    if (static_cast<std::size_t>(b.size()) != a.rows()) {
        throw DimensionError("make_system: " + std::to_string(a.rows()) +
                             " rows but right-hand side of length " + std::to_string(b.size()));
    }
    if (!b.allFinite()) {
        throw NumericalError("make_system: non-finite right-hand side");
    }
    const SvdFactorization f = svd(a);
    Vector x_ls = least_squares_oracle(f, b);
    Vector b_range = mat_vec(a, x_ls);
    Vector b_perp = b - b_range;
    SpectralSummary spectral = spectral_summary(f);
    return LinearSystem{std::move(a), std::move(b), std::move(x_ls), spectral,
                        std::move(b_range), std::move(b_perp)};
}

}  // namespace rbk
