#include <cmath>
#include <random>

#include "doctest.h"
#include "mq/core_maps.hpp"
#include "mq/errors.hpp"
#include "mq/oracles.hpp"

using namespace mq;

namespace {

double max_abs_diff(const Mat2& a, const Mat2& b) {
    double m = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

}  // namespace

TEST_CASE("eigendecomposition reconstructs the Hamiltonian") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int t = 0; t < 200; ++t) {
        SetupParams p = build_params(u(rng), u(rng), u(rng));
        oracle::Real4 h = oracle::hamiltonian(p), v;
        auto lam = oracle::symmetric_eigen(h, v);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double rec = 0.0, orth = 0.0;
                for (int k = 0; k < 4; ++k) {
                    rec += v[i][k] * lam[k] * v[j][k];
                    orth += v[k][i] * v[k][j];
                }
                CHECK(std::abs(rec - h[i][j]) < 1e-13);
                CHECK(std::abs(orth - (i == j ? 1.0 : 0.0)) < 1e-13);
            }
    }
}

TEST_CASE("evolution is unitary and composes") {
    SetupParams a = build_params(2.92, 1.3, 1.0), b = build_params(2.92, 0.4, 1.0), ab = build_params(2.92, 1.7, 1.0);
    oracle::Mat4 ua = oracle::evolution(a), ub = oracle::evolution(b), uab = oracle::evolution(ab);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cplx uu = 0.0, prod = 0.0;
            for (int k = 0; k < 4; ++k) {
                uu += std::conj(ua[k][i]) * ua[k][j];
                prod += ua[i][k] * ub[k][j];
            }
            CHECK(std::abs(uu - (i == j ? 1.0 : 0.0)) < 1e-12);
            CHECK(std::abs(prod - uab[i][j]) < 1e-12);
        }
    oracle::SetupState4 s = oracle::prepare(BlochState::from_angles(1.1, 0.4));
    for (double T : {0.0, 0.3, 2.0, 17.0}) {
        oracle::SetupState4 e = oracle::evolve(s, oracle::evolution(build_params(1.7, T, 0.6)));
        double n = 0.0;
        for (auto x : e) n += std::norm(x);
        CHECK(std::abs(n - 1.0) < 1e-12);
    }
}

TEST_CASE("oracle Kraus pair matches the closed form") {
    auto check = [](double M, double T, double g) {
        SetupParams p = build_params(M, T, g);
        KrausPair a = kraus_matrices(p), b = oracle::kraus_from_hamiltonian(p);
        CHECK(max_abs_diff(a.m_minus, b.m_minus) < 1e-10);
        CHECK(max_abs_diff(a.m_plus, b.m_plus) < 1e-10);
    };
    check(2.92, 3.0, 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int t = 0; t < 100; ++t) check(u(rng) + 1e-3, u(rng), 1.0);
}

TEST_CASE("oracle limits: T = 0 and gamma = 0") {
    KrausPair k = oracle::kraus_from_hamiltonian(build_params(1.4, 0.0, 1.0));
    CHECK(max_abs_diff(k.m_minus, Mat2{{{1.0, 0.0}, {0.0, 1.0}}}) < 1e-14);
    CHECK(max_abs_diff(k.m_plus, Mat2{{{0.0, 0.0}, {0.0, 0.0}}}) < 1e-14);

    const double M = 1.1, T = 0.9;
    KrausPair z = oracle::kraus_from_hamiltonian(build_params(M, T, 0.0));
    CHECK(max_abs_diff(z.m_minus, Mat2{{{std::cos(M * T), 0.0}, {0.0, 1.0}}}) < 1e-14);
    CHECK(max_abs_diff(z.m_plus, Mat2{{{cplx(0.0, -std::sin(M * T)), 0.0}, {0.0, 0.0}}}) < 1e-14);
}

TEST_CASE("tree: depth 0, refusal, weight conservation") {
    SetupParams p = build_params(2.92, 3.0, 1.0);
    DiscretizedDistribution w0 = oracle::enumerate_tree(0.3, 0, p, 100);
    CHECK(std::abs(w0.pr[bin_index(0.3, 100)] - 1.0) < 1e-15);
    CHECK(std::abs(w0.total() - 1.0) < 1e-15);
    CHECK_THROWS_AS(oracle::build_tree(0.3, oracle::kMaxTreeDepth + 1, p), DepthTooLarge);
    for (int d = 1; d <= 10; ++d) {
        oracle::TrajectoryTree t = oracle::build_tree(0.3, d, p);
        REQUIRE(t.leaves.size() == (std::size_t{1} << d));
        double total = 0.0;
        for (const auto& l : t.leaves) total += l.weight;
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("tree: gamma = 0 with MT = pi keeps a single trajectory") {
    SetupParams p = build_params(1.0, kPi, 0.0);
    oracle::TrajectoryTree t = oracle::build_tree(0.7, 6, p);
    CHECK(std::abs(t.leaves[0].weight - 1.0) < 1e-12);
    CHECK(std::abs(t.leaves[0].theta - 0.7) < 1e-12);
    for (std::size_t i = 1; i < t.leaves.size(); ++i) CHECK(t.leaves[i].weight < 1e-24);
}

TEST_CASE("tree leaves equal chained apply_kraus along the bitstring") {
    SetupParams p = build_params(2.92, 3.0, 1.0);
    KrausPair k = kraus_matrices(p);
    const int depth = 12;
    oracle::TrajectoryTree t = oracle::build_tree(0.3, depth, p);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::uint32_t bits = static_cast<std::uint32_t>(rng() & ((1u << depth) - 1));
        BlochState s = BlochState::on_gc(0.3);
        double weight = 1.0;
        for (int step = 0; step < depth; ++step) {
            Outcome mu = (bits >> step) & 1u ? Outcome::Plus : Outcome::Minus;
            auto [next, prob] = apply_kraus(s, mu, k);
            s = next;
            weight *= prob;
        }
        const auto& leaf = t.leaves[bits];
        CHECK(leaf.bits == bits);
        CHECK(std::abs(leaf.weight - weight) < 1e-12);
        BlochState a = fix_phase(s), b = fix_phase(leaf.state);
        CHECK(std::abs(a.alpha - b.alpha) < 1e-9);
        CHECK(std::abs(a.beta - b.beta) < 1e-9);
    }
}

TEST_CASE("12-step chained oracle evolution matches apply_kraus") {
    SetupParams p = build_params(2.92, 3.0, 1.0);
    oracle::Mat4 u = oracle::evolution(p);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        BlochState s = BlochState::from_angles(0.3, kPi / 2.0);
        std::array<cplx, 2> psi{s.alpha, s.beta};
        for (int step = 0; step < 12; ++step) {
            Outcome mu = rng() & 1u ? Outcome::Plus : Outcome::Minus;
            auto raw = oracle::project(oracle::evolve({0.0, psi[0], 0.0, psi[1]}, u), mu);
            double n = std::sqrt(std::norm(raw[0]) + std::norm(raw[1]));
            psi = {raw[0] / n, raw[1] / n};
            s = apply_kraus(s, mu, p).first;
        }
        BlochState a = fix_phase(s), b = fix_phase({psi[0], psi[1]});
        CHECK(std::abs(a.alpha - b.alpha) < 1e-9);
        CHECK(std::abs(a.beta - b.beta) < 1e-9);
    }
}
