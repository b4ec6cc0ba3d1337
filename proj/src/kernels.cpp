#include "mq/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "mq/errors.hpp"

namespace mq::kernels {

namespace {

Backend detect() {
    const char* env = std::getenv("MQ_SIMD");
    if (env && std::string(env) == "scalar") return Backend::Scalar;
#ifdef MQ_HAVE_AVX2_KERNELS
    if (supported(Backend::Avx2)) return Backend::Avx2;
#endif
#ifdef MQ_HAVE_NEON_KERNELS
    return Backend::Neon;
#endif
    return Backend::Scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{detect()};
    return b;
}

}  // namespace

bool supported(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#ifdef MQ_HAVE_AVX2_KERNELS
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#ifdef MQ_HAVE_NEON_KERNELS
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend active() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (!supported(b)) throw InvalidArgument("SIMD backend not supported on this machine: " + std::string(name(b)));
    current().store(b, std::memory_order_relaxed);
}

std::string_view name(Backend b) {
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

// NEON has no gather, so the sparse product stays scalar there.
void csr_matvec(const std::uint64_t* row_ptr, const std::uint32_t* col, const double* val, const double* x,
                double* y, std::size_t rows) {
#ifdef MQ_HAVE_AVX2_KERNELS
    if (active() == Backend::Avx2) return avx2::csr_matvec(row_ptr, col, val, x, y, rows);
#endif
    scalar::csr_matvec(row_ptr, col, val, x, y, rows);
}

#if defined(MQ_HAVE_AVX2_KERNELS)
#define MQ_DISPATCH(fn, ...)                                      \
    if (active() == Backend::Avx2) return avx2::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__)
#elif defined(MQ_HAVE_NEON_KERNELS)
#define MQ_DISPATCH(fn, ...)                                      \
    if (active() == Backend::Neon) return neon::fn(__VA_ARGS__); \
    return scalar::fn(__VA_ARGS__)
#else
#define MQ_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double sum(const double* x, std::size_t n) { MQ_DISPATCH(sum, x, n); }
double sum_squares(const double* x, std::size_t n) { MQ_DISPATCH(sum_squares, x, n); }
double l1_diff(const double* a, const double* b, std::size_t n) { MQ_DISPATCH(l1_diff, a, b, n); }
void scale(double* x, std::size_t n, double s) { MQ_DISPATCH(scale, x, n, s); }
double chi2_sum(const double* p, const double* q, std::size_t n) { MQ_DISPATCH(chi2_sum, p, q, n); }

}  // namespace mq::kernels
