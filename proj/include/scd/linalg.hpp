// Minimal row-major dense matrix used by the feature encoder, the classifier
// and the k-NN baseline. Deliberately tiny: the networks here are a few
// hundred units wide, nothing warrants an external linear algebra package.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scd/common.hpp"

namespace scd {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool empty() const { return rows == 0 || cols == 0; }
};

// Z = X * W^T + b, with X (n x k), W (m x k), b (m). Both operand rows are
// contiguous, so the inner loop is a plain dot product.
inline Matrix affine(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    if (x.cols != w.cols)
        throw ValidationError("affine: dimension mismatch (" + std::to_string(x.cols) + " vs " +
                              std::to_string(w.cols) + ")");
    Matrix z(x.rows, w.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* xi = x.data.data() + i * x.cols;
        double* zi = z.data.data() + i * z.cols;
        for (std::size_t j = 0; j < w.rows; ++j) {
            const double* wj = w.data.data() + j * w.cols;
            double acc = b[j];
            for (std::size_t k = 0; k < x.cols; ++k) acc += xi[k] * wj[k];
            zi[j] = acc;
        }
    }
    return z;
}

// C = A^T * B with A (n x m), B (n x k) -> (m x k). Used for weight gradients.
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    Matrix c(a.cols, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.data.data() + i * a.cols;
        const double* bi = b.data.data() + i * b.cols;
        for (std::size_t j = 0; j < a.cols; ++j) {
            const double aij = ai[j];
            if (aij == 0.0) continue;
            double* cj = c.data.data() + j * c.cols;
            for (std::size_t k = 0; k < b.cols; ++k) cj[k] += aij * bi[k];
        }
    }
    return c;
}

// C = A * B with A (n x m), B (m x k) -> (n x k). Used to push gradients back
// through an affine layer.
inline Matrix matmul_nn(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.data.data() + i * a.cols;
        double* ci = c.data.data() + i * c.cols;
        for (std::size_t j = 0; j < a.cols; ++j) {
            const double aij = ai[j];
            if (aij == 0.0) continue;
            const double* bj = b.data.data() + j * b.cols;
            for (std::size_t k = 0; k < b.cols; ++k) ci[k] += aij * bj[k];
        }
    }
    return c;
}

inline std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> sums(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* mi = m.data.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) sums[j] += mi[j];
    }
    return sums;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace scd
