#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mq/errors.hpp"
#include "mq/kernels.hpp"
#include "mq/markov.hpp"

using namespace mq;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(a)); }

// Lengths that exercise the vector body and every tail length.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 100, 1001, 65537};

template <typename Sum, typename SumSq, typename L1, typename Chi, typename Scale>
void check_reductions(Sum sum, SumSq sum_squares, L1 l1, Chi chi2, Scale scale) {
    for (std::size_t n : kLengths) {
        auto a = random_vector(n, 1 + n), b = random_vector(n, 2 + n);
        if (n > 3) b[3] = a[3] = 0.0;  // exercise the p + q == 0 branch
        CHECK(close(sum(a.data(), n), kernels::scalar::sum(a.data(), n), 1e-13));
        CHECK(close(sum_squares(a.data(), n), kernels::scalar::sum_squares(a.data(), n), 1e-13));
        CHECK(close(l1(a.data(), b.data(), n), kernels::scalar::l1_diff(a.data(), b.data(), n), 1e-13));
        CHECK(close(chi2(a.data(), b.data(), n), kernels::scalar::chi2_sum(a.data(), b.data(), n), 1e-13));
        auto s1 = a, s2 = a;
        scale(s1.data(), n, 0.37);
        kernels::scalar::scale(s2.data(), n, 0.37);
        CHECK(s1 == s2);
    }
}

SparseMarkov random_csr(std::size_t n, std::size_t max_row, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SparseMarkov m;
    m.n = n;
    m.row_ptr.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t len = rng() % (max_row + 1);
        for (std::size_t j = 0; j < len; ++j) {
            m.col.push_back(static_cast<std::uint32_t>(rng() % n));
            m.val.push_back(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
        }
        m.row_ptr.push_back(m.col.size());
    }
    return m;
}

}  // namespace

TEST_CASE("scalar reference kernels") {
    std::vector<double> a{1.0, 2.0, 3.0}, b{1.0, 0.0, 5.0};
    CHECK(kernels::scalar::sum(a.data(), 3) == 6.0);
    CHECK(kernels::scalar::sum_squares(a.data(), 3) == 14.0);
    CHECK(kernels::scalar::l1_diff(a.data(), b.data(), 3) == 4.0);
    CHECK(kernels::scalar::chi2_sum(a.data(), b.data(), 3) == doctest::Approx(0.0 + 4.0 / 2.0 + 4.0 / 8.0));
    std::vector<double> z{0.0, 0.0};
    CHECK(kernels::scalar::chi2_sum(z.data(), z.data(), 2) == 0.0);
}

TEST_CASE("backend selection") {
    CHECK(kernels::supported(kernels::Backend::Scalar));
    kernels::Backend before = kernels::active();
    kernels::set_backend(kernels::Backend::Scalar);
    CHECK(kernels::active() == kernels::Backend::Scalar);
    CHECK(kernels::name(kernels::Backend::Avx2) == "avx2");
    if (!kernels::supported(kernels::Backend::Neon))
        CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::Neon), InvalidArgument);
    kernels::set_backend(before);
}

#ifdef MQ_HAVE_AVX2_KERNELS
TEST_CASE("AVX2 kernels equal the scalar reference") {
    if (!kernels::supported(kernels::Backend::Avx2)) {
        MESSAGE("AVX2 not available on this CPU; skipped");
        return;
    }
    check_reductions(kernels::avx2::sum, kernels::avx2::sum_squares, kernels::avx2::l1_diff, kernels::avx2::chi2_sum,
                     kernels::avx2::scale);
    for (std::size_t max_row : {0, 1, 3, 4, 5, 9, 40}) {
        SparseMarkov m = random_csr(777, max_row, max_row + 17);
        auto x = random_vector(777, 99);
        std::vector<double> y1(777), y2(777);
        kernels::avx2::csr_matvec(m.row_ptr.data(), m.col.data(), m.val.data(), x.data(), y1.data(), 777);
        kernels::scalar::csr_matvec(m.row_ptr.data(), m.col.data(), m.val.data(), x.data(), y2.data(), 777);
        for (std::size_t i = 0; i < 777; ++i) CHECK(close(y1[i], y2[i], 1e-13));
    }
}
#endif

#ifdef MQ_HAVE_NEON_KERNELS
TEST_CASE("NEON kernels equal the scalar reference") {
    check_reductions(kernels::neon::sum, kernels::neon::sum_squares, kernels::neon::l1_diff, kernels::neon::chi2_sum,
                     kernels::neon::scale);
}
#endif

TEST_CASE("solver output does not depend on the backend") {
    SparseMarkov m = build_markov(build_params(2.92, 3.1), 2000);
    kernels::Backend before = kernels::active();
    kernels::set_backend(kernels::Backend::Scalar);
    SolveResult a = power_iterate(m, DiscretizedDistribution::uniform(2000));
    kernels::set_backend(before);
    SolveResult b = power_iterate(m, DiscretizedDistribution::uniform(2000));
    CHECK(a.report.converged);
    CHECK(b.report.converged);
    double diff = kernels::scalar::l1_diff(a.w.pr.data(), b.w.pr.data(), 2000);
    CHECK(diff < 1e-10);
}
