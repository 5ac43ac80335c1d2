#include "rbk/core.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

namespace rbk {

namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

double read_value(std::istream& in, const char* what) {
    double v = 0.0;
    if (!(in >> v)) {
        throw std::runtime_error(std::string(what) + ": truncated or malformed data");
    }
    return v;
}

std::size_t read_count(std::istream& in, const char* what) {
    long long v = 0;
    if (!(in >> v) || v <= 0) {
        throw std::runtime_error(std::string(what) + ": bad dimension header");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

DenseMatrix read_matrix(std::istream& in) {
    const std::size_t n = read_count(in, "read_matrix");
    const std::size_t d = read_count(in, "read_matrix");
    DenseMatrix a(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            a(i, j) = read_value(in, "read_matrix");
        }
    }
    a.check_finite();
    return a;
}

Vector read_vector(std::istream& in) {
    const std::size_t n = read_count(in, "read_vector");
    Vector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        v(static_cast<Eigen::Index>(i)) = read_value(in, "read_vector");
    }
    if (!v.allFinite()) {
        throw NumericalError("read_vector: non-finite entry");
    }
    return v;
}

void write_matrix(std::ostream& out, const DenseMatrix& a) {
    out << a.rows() << ' ' << a.cols() << '\n' << std::setprecision(kDigits);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j > 0) out << ' ';
            out << a(i, j);
        }
        out << '\n';
    }
}

void write_vector(std::ostream& out, const Vector& v) {
    out << v.size() << '\n' << std::setprecision(kDigits);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out << v(i) << '\n';
    }
}

DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
    try {
        return read_matrix(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

Vector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file '" + path + "'");
    try {
        return read_vector(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_matrix_file(const std::string& path, const DenseMatrix& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write matrix file '" + path + "'");
    write_matrix(out, a);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_vector_file(const std::string& path, const Vector& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write vector file '" + path + "'");
    write_vector(out, v);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace rbk
