#include "stf/ml/kernels.hpp"

#include <atomic>
#include <cmath>

namespace stf::kernels {

namespace {

#ifdef STF_HAVE_OPENMP
std::atomic<Backend> g_backend{Backend::OpenMP};
#else
std::atomic<Backend> g_backend{Backend::Serial};
#endif

inline double gram_entry(const Matrix& x, std::size_t a, std::size_t b) {
    const std::size_t d = x.cols;
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double va = a == d ? 1.0 : x(i, a);
        const double vb = b == d ? 1.0 : x(i, b);
        s += va * vb;
    }
    return s;
}

inline double xty_entry(const Matrix& x, const Matrix& y, std::size_t col, std::size_t a) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) s += (a == x.cols ? 1.0 : x(i, a)) * y(i, col);
    return s;
}

inline double sq_distance(const double* p, const double* q, std::size_t d) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = p[j] - q[j];
        s += diff * diff;
    }
    return s;
}

inline double residual(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w, std::size_t i) {
    const std::size_t d = x.cols;
    double z = w[d];
    for (std::size_t j = 0; j < d; ++j) z += w[j] * x(i, j);
    return sigmoid(z) - y[i];
}

inline double gradient_entry(const Matrix& x, const std::vector<double>& r, std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) s += r[i] * (j == x.cols ? 1.0 : x(i, j));
    return s / static_cast<double>(x.rows);
}

}  // namespace

Backend backend() { return g_backend.load(); }
void set_backend(Backend b) { g_backend.store(openmp_available() ? b : Backend::Serial); }

bool openmp_available() {
#ifdef STF_HAVE_OPENMP
    return true;
#else
    return false;
#endif
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace serial {

Matrix gram(const Matrix& x) {
    const std::size_t m = x.cols + 1;
    Matrix g(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) g(a, b) = g(b, a) = gram_entry(x, a, b);
    }
    return g;
}

std::vector<double> xty(const Matrix& x, const Matrix& y, std::size_t col) {
    std::vector<double> out(x.cols + 1);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = xty_entry(x, y, col, a);
    return out;
}

Matrix sq_distances(const Matrix& queries, const Matrix& train) {
    Matrix out(queries.rows, train.rows);
    for (std::size_t i = 0; i < queries.rows; ++i) {
        for (std::size_t j = 0; j < train.rows; ++j) out(i, j) = sq_distance(queries.row(i), train.row(j), train.cols);
    }
    return out;
}

std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w) {
    std::vector<double> r(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) r[i] = residual(x, y, w, i);
    std::vector<double> g(x.cols + 1);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = gradient_entry(x, r, j);
    return g;
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace serial

namespace omp {

Matrix gram(const Matrix& x) {
    const auto m = static_cast<std::ptrdiff_t>(x.cols + 1);
    Matrix g(m, m);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t a = 0; a < m; ++a) {
        for (std::ptrdiff_t b = a; b < m; ++b) g(a, b) = g(b, a) = gram_entry(x, a, b);
    }
    return g;
}

std::vector<double> xty(const Matrix& x, const Matrix& y, std::size_t col) {
    const auto m = static_cast<std::ptrdiff_t>(x.cols + 1);
    std::vector<double> out(m);
#pragma omp parallel for
    for (std::ptrdiff_t a = 0; a < m; ++a) out[a] = xty_entry(x, y, col, a);
    return out;
}

Matrix sq_distances(const Matrix& queries, const Matrix& train) {
    Matrix out(queries.rows, train.rows);
    const auto n = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel for
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < train.rows; ++j) out(i, j) = sq_distance(queries.row(i), train.row(j), train.cols);
    }
    return out;
}

std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w) {
    const auto n = static_cast<std::ptrdiff_t>(x.rows);
    const auto m = static_cast<std::ptrdiff_t>(x.cols + 1);
    std::vector<double> r(x.rows);
    std::vector<double> g(m);
#pragma omp parallel
    {
#pragma omp for
        for (std::ptrdiff_t i = 0; i < n; ++i) r[i] = residual(x, y, w, i);
#pragma omp for
        for (std::ptrdiff_t j = 0; j < m; ++j) g[j] = gradient_entry(x, r, j);
    }
    return g;
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace omp

Matrix gram(const Matrix& x) { return backend() == Backend::OpenMP ? omp::gram(x) : serial::gram(x); }

std::vector<double> xty(const Matrix& x, const Matrix& y, std::size_t col) {
    return backend() == Backend::OpenMP ? omp::xty(x, y, col) : serial::xty(x, y, col);
}

Matrix sq_distances(const Matrix& queries, const Matrix& train) {
    return backend() == Backend::OpenMP ? omp::sq_distances(queries, train) : serial::sq_distances(queries, train);
}

std::vector<double> logistic_gradient(const Matrix& x, const std::vector<double>& y, const std::vector<double>& w) {
    return backend() == Backend::OpenMP ? omp::logistic_gradient(x, y, w) : serial::logistic_gradient(x, y, w);
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (backend() == Backend::OpenMP) {
        omp::for_each_index(n, body);
    } else {
        serial::for_each_index(n, body);
    }
}

}  // namespace stf::kernels
