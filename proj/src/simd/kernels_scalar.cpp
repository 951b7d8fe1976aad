#include "ipc/simd/kernels.hpp"

#include <cmath>

namespace ipc::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_scalar(const double* w, const double* x, const double* bias, double* y,
                 std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double s = dot_scalar(w + r * cols, x, cols);
        y[r] = bias ? s + bias[r] : s;
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gemv_t_scalar(const double* w, const double* g, double* out, std::size_t rows,
                   std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], w + r * cols, out, cols);
}

void ger_scalar(double* G, const double* g, const double* x, std::size_t rows,
                std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], x, G + r * cols, cols);
}

void leaky_relu_scalar(const double* z, double* out, std::size_t n, double slope) {
    for (std::size_t i = 0; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : slope * z[i];
}

void leaky_relu_backward_scalar(const double* pre, double* grad, std::size_t n,
                                double slope) {
    for (std::size_t i = 0; i < n; ++i) grad[i] *= pre[i] > 0.0 ? 1.0 : slope;
}

void adam_update_scalar(double* w, const double* g, double* m, double* v, std::size_t n,
                        const AdamCoeffs& c) {
    const double one_m_b1 = 1.0 - c.beta1;
    const double one_m_b2 = 1.0 - c.beta2;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = c.beta1 * m[i] + one_m_b1 * g[i];
        v[i] = c.beta2 * v[i] + one_m_b2 * (g[i] * g[i]);
        const double mhat = m[i] / c.bias1;
        const double vhat = v[i] / c.bias2;
        w[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
    static const KernelTable table{
        Backend::Scalar,   dot_scalar,        gemv_scalar,
        gemv_t_scalar,     ger_scalar,        axpy_scalar,
        leaky_relu_scalar, leaky_relu_backward_scalar, adam_update_scalar,
    };
    return table;
}

}  // namespace ipc::simd
