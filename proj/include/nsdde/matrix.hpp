#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace nsdde {

// Minimal dense row-major matrix. Mode counts and state dimensions in this
// library are tiny, so no effort is spent on blocking or expression fusion.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    Matrix operator*(const Matrix& rhs) const {
        Matrix out(rows, rhs.cols);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t k = 0; k < cols; ++k) {
                const double v = (*this)(i, k);
                if (v == 0.0) continue;
                for (std::size_t j = 0; j < rhs.cols; ++j) {
                    out(i, j) += v * rhs(k, j);
                }
            }
        }
        return out;
    }

    Matrix& operator+=(const Matrix& rhs) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += rhs.a[i];
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : a) v *= s;
        return *this;
    }

    // Induced infinity norm (max absolute row sum).
    double row_sum_norm() const {
        double best = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += std::abs((*this)(i, j));
            best = std::max(best, s);
        }
        return best;
    }

    // Max absolute entry.
    double max_abs() const {
        double best = 0.0;
        for (double v : a) best = std::max(best, std::abs(v));
        return best;
    }

    // Trace norm sqrt(sum a_ij^2), the matrix norm used for growth bounds.
    double trace_norm() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (double v : a) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }
};

inline double max_abs_diff(const Matrix& x, const Matrix& y) {
    double best = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) {
        best = std::max(best, std::abs(x.a[i] - y.a[i]));
    }
    return best;
}

} // namespace nsdde
