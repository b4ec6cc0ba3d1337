#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Hot-loop kernels with a scalar reference and SIMD variants picked at runtime.
// MQ_SIMD=scalar in the environment forces the reference path.
namespace mq::kernels {

enum class Backend { Scalar, Avx2, Neon };

bool supported(Backend b);
Backend active();
void set_backend(Backend b);  // throws InvalidArgument if unsupported here
std::string_view name(Backend b);

// y[i] = sum_{j in [row_ptr[i], row_ptr[i+1])} val[j] * x[col[j]]
void csr_matvec(const std::uint64_t* row_ptr, const std::uint32_t* col, const double* val,
                const double* x, double* y, std::size_t rows);
double sum(const double* x, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double l1_diff(const double* a, const double* b, std::size_t n);
void scale(double* x, std::size_t n, double s);
// sum_i (p_i - q_i)^2 / (p_i + q_i), zero where p_i + q_i == 0
double chi2_sum(const double* p, const double* q, std::size_t n);

namespace scalar {
void csr_matvec(const std::uint64_t*, const std::uint32_t*, const double*, const double*, double*, std::size_t);
double sum(const double*, std::size_t);
double sum_squares(const double*, std::size_t);
double l1_diff(const double*, const double*, std::size_t);
void scale(double*, std::size_t, double);
double chi2_sum(const double*, const double*, std::size_t);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define MQ_HAVE_AVX2_KERNELS 1
namespace avx2 {
void csr_matvec(const std::uint64_t*, const std::uint32_t*, const double*, const double*, double*, std::size_t);
double sum(const double*, std::size_t);
double sum_squares(const double*, std::size_t);
double l1_diff(const double*, const double*, std::size_t);
void scale(double*, std::size_t, double);
double chi2_sum(const double*, const double*, std::size_t);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define MQ_HAVE_NEON_KERNELS 1
namespace neon {
double sum(const double*, std::size_t);
double sum_squares(const double*, std::size_t);
double l1_diff(const double*, const double*, std::size_t);
void scale(double*, std::size_t, double);
double chi2_sum(const double*, const double*, std::size_t);
}  // namespace neon
#endif

}  // namespace mq::kernels
