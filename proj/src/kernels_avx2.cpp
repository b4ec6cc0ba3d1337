#include "mq/kernels.hpp"

#ifdef MQ_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <cmath>

#define MQ_AVX2 __attribute__((target("avx2,fma")))

namespace mq::kernels::avx2 {

namespace {

MQ_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

MQ_AVX2 void csr_matvec(const std::uint64_t* row_ptr, const std::uint32_t* col, const double* val,
                        const double* x, double* y, std::size_t rows) {
    for (std::size_t i = 0; i < rows; ++i) {
        std::uint64_t j = row_ptr[i];
        const std::uint64_t end = row_ptr[i + 1];
        double s = 0.0;
        if (end - j >= 4) {
            __m256d acc = _mm256_setzero_pd();
            for (; j + 4 <= end; j += 4) {
                __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + j));
                __m256d xv = _mm256_i32gather_pd(x, idx, 8);
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + j), xv, acc);
            }
            s = hsum(acc);
        }
        for (; j < end; ++j) s += val[j] * x[col[j]];
        y[i] = s;
    }
}

MQ_AVX2 double sum(const double* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
        a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
    }
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += x[i];
    return s;
}

MQ_AVX2 double sum_squares(const double* x, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(x + i), v1 = _mm256_loadu_pd(x + i + 4);
        a0 = _mm256_fmadd_pd(v0, v0, a0);
        a1 = _mm256_fmadd_pd(v1, v1, a1);
    }
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

MQ_AVX2 double l1_diff(const double* a, const double* b, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        a0 = _mm256_add_pd(a0, _mm256_and_pd(d0, mask));
        a1 = _mm256_add_pd(a1, _mm256_and_pd(d1, mask));
    }
    double s = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

MQ_AVX2 void scale(double* x, std::size_t n, double f) {
    const __m256d fv = _mm256_set1_pd(f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), fv));
    for (; i < n; ++i) x[i] *= f;
}

MQ_AVX2 double chi2_sum(const double* p, const double* q, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d pv = _mm256_loadu_pd(p + i), qv = _mm256_loadu_pd(q + i);
        __m256d t = _mm256_add_pd(pv, qv);
        __m256d d = _mm256_sub_pd(pv, qv);
        __m256d pos = _mm256_cmp_pd(t, zero, _CMP_GT_OQ);
        __m256d safe = _mm256_blendv_pd(one, t, pos);
        __m256d term = _mm256_div_pd(_mm256_mul_pd(d, d), safe);
        acc = _mm256_add_pd(acc, _mm256_and_pd(term, pos));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double t = p[i] + q[i];
        if (t > 0.0) {
            double d = p[i] - q[i];
            s += d * d / t;
        }
    }
    return s;
}

}  // namespace mq::kernels::avx2

#endif
