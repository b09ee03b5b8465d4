#pragma once

#include <cstddef>
#include <vector>

namespace stf {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }

    /// Rows selected by index, in the given order.
    Matrix take_rows(const std::vector<std::size_t>& idx) const;
    std::vector<double> column(std::size_t c) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

}  // namespace stf
