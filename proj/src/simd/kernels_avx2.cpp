// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "ipc/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace ipc::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv_avx2(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double s = dot_avx2(w + r * cols, x, cols);
        y[r] = bias ? s + bias[r] : s;
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void gemv_t_avx2(const double* w, const double* g, double* out, std::size_t rows,
                 std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], w + r * cols, out, cols);
}

void ger_avx2(double* G, const double* g, const double* x, std::size_t rows,
              std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], x, G + r * cols, cols);
}

void leaky_relu_avx2(const double* z, double* out, std::size_t n, double slope) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d vs = _mm256_set1_pd(slope);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vz = _mm256_loadu_pd(z + i);
        const __m256d pos = _mm256_cmp_pd(vz, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(_mm256_mul_pd(vs, vz), vz, pos));
    }
    for (; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : slope * z[i];
}

void leaky_relu_backward_avx2(const double* pre, double* grad, std::size_t n,
                              double slope) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vs = _mm256_set1_pd(slope);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d pos = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
        const __m256d factor = _mm256_blendv_pd(vs, one, pos);
        _mm256_storeu_pd(grad + i, _mm256_mul_pd(_mm256_loadu_pd(grad + i), factor));
    }
    for (; i < n; ++i) grad[i] *= pre[i] > 0.0 ? 1.0 : slope;
}

// Same operation order as the scalar reference, no fused ops: results are bit-identical.
void adam_update_avx2(double* w, const double* g, double* m, double* v, std::size_t n,
                      const AdamCoeffs& c) {
    const __m256d b1 = _mm256_set1_pd(c.beta1);
    const __m256d b2 = _mm256_set1_pd(c.beta2);
    const __m256d omb1 = _mm256_set1_pd(1.0 - c.beta1);
    const __m256d omb2 = _mm256_set1_pd(1.0 - c.beta2);
    const __m256d bias1 = _mm256_set1_pd(c.bias1);
    const __m256d bias2 = _mm256_set1_pd(c.bias2);
    const __m256d lr = _mm256_set1_pd(c.lr);
    const __m256d eps = _mm256_set1_pd(c.eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vg = _mm256_loadu_pd(g + i);
        const __m256d vm = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                         _mm256_mul_pd(omb1, vg));
        const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                         _mm256_mul_pd(omb2, _mm256_mul_pd(vg, vg)));
        _mm256_storeu_pd(m + i, vm);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(vm, bias1);
        const __m256d vhat = _mm256_div_pd(vv, bias2);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, mhat),
                                           _mm256_add_pd(_mm256_sqrt_pd(vhat), eps));
        _mm256_storeu_pd(w + i, _mm256_sub_pd(_mm256_loadu_pd(w + i), step));
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

const KernelTable& avx2_kernels() noexcept {
    static const KernelTable table{
        Backend::Avx2,   dot_avx2,        gemv_avx2,
        gemv_t_avx2,     ger_avx2,        axpy_avx2,
        leaky_relu_avx2, leaky_relu_backward_avx2, adam_update_avx2,
    };
    return table;
}

}  // namespace ipc::simd

#endif
