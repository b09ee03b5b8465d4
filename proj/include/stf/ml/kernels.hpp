#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "stf/ml/matrix.hpp"

namespace stf::kernels {

enum class Backend { Serial, OpenMP };

/// Process-wide backend used by the learners. Defaults to OpenMP when built with it.
Backend backend();
void set_backend(Backend b);
bool openmp_available();

// Every reduction is summed serially per output entry in index order, so
// both variants produce bit-identical results.

namespace serial {
/// [X 1]^T [X 1]: (d+1) x (d+1), intercept last.
Matrix gram(const Matrix& x);
/// [X 1]^T y[:, col]
std::vector<double> xty(const Matrix& x, const Matrix& y, std::size_t col);
/// out(i, j) = ||q_i - t_j||^2
Matrix sq_distances(const Matrix& queries, const Matrix& train);
/// Mean gradient of the logistic loss; last entry is the intercept.
std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w);
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body);
}  // namespace serial

namespace omp {
Matrix gram(const Matrix& x);
std::vector<double> xty(const Matrix& x, const Matrix& y, std::size_t col);
Matrix sq_distances(const Matrix& queries, const Matrix& train);
std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w);
/// Runs body(i) for i in [0, n) across threads; body writes only to slot i.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body);
}  // namespace omp

Matrix gram(const Matrix& x);
std::vector<double> xty(const Matrix& x, const Matrix& y, std::size_t col);
Matrix sq_distances(const Matrix& queries, const Matrix& train);
std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w);
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body);

double sigmoid(double z);

}  // namespace stf::kernels
