#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "ipc/simd/kernels.hpp"

namespace ipc::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* resolve_default() noexcept {
    if (const char* env = std::getenv("IPC_SIMD")) {
        if (auto b = parse_backend(env); b && backend_available(*b)) return &kernels_for(*b);
    }
    if (backend_available(Backend::Avx2)) return &kernels_for(Backend::Avx2);
    if (backend_available(Backend::Neon)) return &kernels_for(Backend::Neon);
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{resolve_default()};
    return table;
}

}  // namespace

bool backend_available(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
            return cpu_has_avx2();
        case Backend::Neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& kernels_for(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::Avx2:
            if (cpu_has_avx2()) return avx2_kernels();
            break;
#endif
#if defined(__aarch64__)
        case Backend::Neon:
            return neon_kernels();
#endif
        default:
            break;
    }
    throw std::invalid_argument("simd backend not available: " +
                                std::string(backend_name(b)));
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool set_backend(Backend b) noexcept {
    if (!backend_available(b)) return false;
    current().store(&kernels_for(b), std::memory_order_release);
    return true;
}

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
        case Backend::Neon:
            return "neon";
    }
    return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
    if (name == "scalar") return Backend::Scalar;
    if (name == "avx2") return Backend::Avx2;
    if (name == "neon") return Backend::Neon;
    return std::nullopt;
}

}  // namespace ipc::simd
