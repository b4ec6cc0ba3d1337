#include <cmath>

#include "mq/kernels.hpp"

namespace mq::kernels::scalar {

void csr_matvec(const std::uint64_t* row_ptr, const std::uint32_t* col, const double* val, const double* x,
                double* y, std::size_t rows) {
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::uint64_t j = row_ptr[i]; j < row_ptr[i + 1]; ++j) s += val[j] * x[col[j]];
        y[i] = s;
    }
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double sum_squares(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double l1_diff(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

void scale(double* x, std::size_t n, double f) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= f;
}

double chi2_sum(const double* p, const double* q, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = p[i] + q[i];
        if (t > 0.0) {
            double d = p[i] - q[i];
            s += d * d / t;
        }
    }
    return s;
}

}  // namespace mq::kernels::scalar
