#pragma once

// Dense double-precision kernels used by the network's inner loops.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on aarch64) are selected once at runtime from CPU features and
// can be pinned with IPC_SIMD=scalar|avx2|neon or set_backend().
//
// Vector variants may differ from the scalar reference in the last few ulps for
// reductions (different summation order, fused multiply-add). Elementwise
// kernels without reductions (leaky_relu*, adam_update) are bit-identical.

#include <cstddef>
#include <optional>
#include <string_view>

namespace ipc::simd {

enum class Backend { Scalar, Avx2, Neon };

struct AdamCoeffs {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double bias1;  // 1 - beta1^t
    double bias2;  // 1 - beta2^t
};

struct KernelTable {
    Backend backend;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // y = W x + bias, W row-major rows x cols. bias may be null.
    void (*gemv)(const double* w, const double* x, const double* bias, double* y,
                 std::size_t rows, std::size_t cols);

    // out = W^T g, W row-major rows x cols, out has cols entries.
    void (*gemv_t)(const double* w, const double* g, double* out, std::size_t rows,
                   std::size_t cols);

    // G += g x^T, G row-major rows x cols.
    void (*ger)(double* G, const double* g, const double* x, std::size_t rows,
                std::size_t cols);

    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    // out[i] = z[i] > 0 ? z[i] : slope * z[i]
    void (*leaky_relu)(const double* z, double* out, std::size_t n, double slope);

    // grad[i] *= (pre[i] > 0 ? 1 : slope)
    void (*leaky_relu_backward)(const double* pre, double* grad, std::size_t n,
                                double slope);

    // In-place Adam step over a flat parameter block.
    void (*adam_update)(double* w, const double* g, double* m, double* v, std::size_t n,
                        const AdamCoeffs& c);
};

const KernelTable& scalar_kernels() noexcept;
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(__aarch64__)
const KernelTable& neon_kernels() noexcept;
#endif

bool backend_available(Backend b) noexcept;

// The table used by the network. First call resolves it from the environment and CPU.
const KernelTable& active() noexcept;

// Pin a backend. Returns false (and leaves the selection unchanged) if the CPU
// or build does not support it. Not safe to call concurrently with training.
bool set_backend(Backend b) noexcept;

const KernelTable& kernels_for(Backend b);

std::string_view backend_name(Backend b) noexcept;
std::optional<Backend> parse_backend(std::string_view name) noexcept;

}  // namespace ipc::simd
