#include "mq/kernels.hpp"

#ifdef MQ_HAVE_NEON_KERNELS

#include <arm_neon.h>

#include <cmath>

namespace mq::kernels::neon {

double sum(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        a0 = vaddq_f64(a0, vld1q_f64(x + i));
        a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double sum_squares(const double* x, std::size_t n) {
    float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float64x2_t v0 = vld1q_f64(x + i), v1 = vld1q_f64(x + i + 2);
        a0 = vfmaq_f64(a0, v0, v0);
        a1 = vfmaq_f64(a1, v1, v1);
    }
    double s = vaddvq_f64(vaddq_f64(a0, a1));
    for (; i < n; ++i) s += x[i] * x[i];
    return s;
}

double l1_diff(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

void scale(double* x, std::size_t n, double f) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), f));
    for (; i < n; ++i) x[i] *= f;
}

double chi2_sum(const double* p, const double* q, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0), one = vdupq_n_f64(1.0);
    float64x2_t acc = zero;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t pv = vld1q_f64(p + i), qv = vld1q_f64(q + i);
        float64x2_t t = vaddq_f64(pv, qv), d = vsubq_f64(pv, qv);
        uint64x2_t pos = vcgtq_f64(t, zero);
        float64x2_t term = vdivq_f64(vmulq_f64(d, d), vbslq_f64(pos, t, one));
        acc = vaddq_f64(acc, vbslq_f64(pos, term, zero));
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        double t = p[i] + q[i];
        if (t > 0.0) {
            double d = p[i] - q[i];
            s += d * d / t;
        }
    }
    return s;
}

}  // namespace mq::kernels::neon

#endif
