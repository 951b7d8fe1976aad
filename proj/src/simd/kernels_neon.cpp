#include "ipc/simd/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace ipc::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_neon(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double s = dot_neon(w + r * cols, x, cols);
        y[r] = bias ? s + bias[r] : s;
    }
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void gemv_t_neon(const double* w, const double* g, double* out, std::size_t rows,
                 std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_neon(g[r], w + r * cols, out, cols);
}

void ger_neon(double* G, const double* g, const double* x, std::size_t rows,
              std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) axpy_neon(g[r], x, G + r * cols, cols);
}

void leaky_relu_neon(const double* z, double* out, std::size_t n, double slope) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t vs = vdupq_n_f64(slope);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vz = vld1q_f64(z + i);
        vst1q_f64(out + i, vbslq_f64(vcgtq_f64(vz, zero), vz, vmulq_f64(vs, vz)));
    }
    for (; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : slope * z[i];
}

void leaky_relu_backward_neon(const double* pre, double* grad, std::size_t n,
                              double slope) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t vs = vdupq_n_f64(slope);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t f = vbslq_f64(vcgtq_f64(vld1q_f64(pre + i), zero), one, vs);
        vst1q_f64(grad + i, vmulq_f64(vld1q_f64(grad + i), f));
    }
    for (; i < n; ++i) grad[i] *= pre[i] > 0.0 ? 1.0 : slope;
}

void adam_update_neon(double* w, const double* g, double* m, double* v, std::size_t n,
                      const AdamCoeffs& c) {
    const float64x2_t b1 = vdupq_n_f64(c.beta1);
    const float64x2_t b2 = vdupq_n_f64(c.beta2);
    const float64x2_t omb1 = vdupq_n_f64(1.0 - c.beta1);
    const float64x2_t omb2 = vdupq_n_f64(1.0 - c.beta2);
    const float64x2_t bias1 = vdupq_n_f64(c.bias1);
    const float64x2_t bias2 = vdupq_n_f64(c.bias2);
    const float64x2_t lr = vdupq_n_f64(c.lr);
    const float64x2_t eps = vdupq_n_f64(c.eps);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vg = vld1q_f64(g + i);
        const float64x2_t vm = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(omb1, vg));
        const float64x2_t vv =
            vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(omb2, vmulq_f64(vg, vg)));
        vst1q_f64(m + i, vm);
        vst1q_f64(v + i, vv);
        const float64x2_t mhat = vdivq_f64(vm, bias1);
        const float64x2_t vhat = vdivq_f64(vv, bias2);
        const float64x2_t step =
            vdivq_f64(vmulq_f64(lr, mhat), vaddq_f64(vsqrtq_f64(vhat), eps));
        vst1q_f64(w + i, vsubq_f64(vld1q_f64(w + i), step));
    }
    const double one_m_b1 = 1.0 - c.beta1;
    const double one_m_b2 = 1.0 - c.beta2;
    for (; i < n; ++i) {
        m[i] = c.beta1 * m[i] + one_m_b1 * g[i];
        v[i] = c.beta2 * v[i] + one_m_b2 * (g[i] * g[i]);
        const double mhat = m[i] / c.bias1;
        const double vhat = v[i] / c.bias2;
        w[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

}  // namespace

const KernelTable& neon_kernels() noexcept {
    static const KernelTable table{
        Backend::Neon,   dot_neon,        gemv_neon,
        gemv_t_neon,     ger_neon,        axpy_neon,
        leaky_relu_neon, leaky_relu_backward_neon, adam_update_neon,
    };
    return table;
}

}  // namespace ipc::simd

#endif
