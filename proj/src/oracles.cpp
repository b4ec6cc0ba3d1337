#include "mq/oracles.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "mq/errors.hpp"

namespace mq::oracle {

std::array<double, 4> symmetric_eigen(Real4 a, Real4& v) {
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = a[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v[i][j] = es.eigenvectors()(i, j);
    const auto& lam = es.eigenvalues();
    return {lam(0), lam(1), lam(2), lam(3)};
}

Real4 hamiltonian(const SetupParams& p) {
    const double M = p.M, g = p.gamma;
    return {{{0.0, M, g, 0.0}, {M, 0.0, 0.0, g}, {g, 0.0, 0.0, 0.0}, {0.0, g, 0.0, 0.0}}};
}

Mat4 evolution(const SetupParams& p) {
    Real4 v;
    auto lam = symmetric_eigen(hamiltonian(p), v);
    Mat4 u{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < 4; ++k) s += v[i][k] * std::polar(1.0, -lam[k] * p.T) * v[j][k];
            u[i][j] = s;
        }
    return u;
}

SetupState4 prepare(const BlochState& s) { return {0.0, s.alpha, 0.0, s.beta}; }

SetupState4 evolve(const SetupState4& s, const Mat4& u) {
    SetupState4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += u[i][j] * s[j];
    return r;
}

std::array<cplx, 2> project(const SetupState4& s, Outcome mu) {
    return mu == Outcome::Plus ? std::array<cplx, 2>{s[0], s[2]} : std::array<cplx, 2>{s[1], s[3]};
}

KrausPair kraus_from_hamiltonian(const SetupParams& p) {
    Mat4 u = evolution(p);
    KrausPair k;
    // Input column j selects |1,0>|-> (index 1) or |0,1>|-> (index 3).
    const int in[2] = {1, 3};
    const int out_plus[2] = {0, 2};
    const int out_minus[2] = {1, 3};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            k.m_plus[r][c] = u[out_plus[r]][in[c]];
            k.m_minus[r][c] = u[out_minus[r]][in[c]];
        }
    k.det_minus = det(k.m_minus);
    k.det_plus = det(k.m_plus);
    k.eig_minus = eigen2(k.m_minus);
    k.eig_plus = eigen2(k.m_plus);
    k.gc_minus = gc_map_of(k.m_minus);
    k.gc_plus = gc_map_of(k.m_plus);
    return k;
}

TrajectoryTree build_tree(double theta0, int depth, const SetupParams& p) {
    if (depth < 0) throw InvalidArgument("tree depth must be nonnegative");
    if (depth > kMaxTreeDepth)
        throw DepthTooLarge("tree depth " + std::to_string(depth) + " exceeds " + std::to_string(kMaxTreeDepth));
    Mat4 u = evolution(p);

    struct Node {
        std::array<cplx, 2> psi;  // unnormalized, norm^2 = Born weight
    };
    std::vector<Node> level{{{cplx(std::cos(theta0 / 2.0)), cplx(0.0, std::sin(theta0 / 2.0))}}};
    for (int step = 0; step < depth; ++step) {
        std::vector<Node> next(level.size() * 2);
        for (std::size_t idx = 0; idx < level.size(); ++idx) {
            SetupState4 s = evolve({0.0, level[idx].psi[0], 0.0, level[idx].psi[1]}, u);
            next[idx] = {project(s, Outcome::Minus)};
            next[idx | (std::size_t{1} << step)] = {project(s, Outcome::Plus)};
        }
        level.swap(next);
    }

    TrajectoryTree tree;
    tree.depth = depth;
    tree.leaves.resize(level.size());
    for (std::size_t idx = 0; idx < level.size(); ++idx) {
        auto& leaf = tree.leaves[idx];
        const auto& psi = level[idx].psi;
        leaf.bits = static_cast<std::uint32_t>(idx);
        leaf.weight = std::norm(psi[0]) + std::norm(psi[1]);
        double n = std::sqrt(leaf.weight);
        leaf.state = n > 0.0 ? fix_phase({psi[0] / n, psi[1] / n}) : BlochState::on_gc(theta0);
        leaf.theta = leaf.state.gc_theta();
    }
    return tree;
}

DiscretizedDistribution enumerate_tree(double theta0, int depth, const SetupParams& p, std::size_t bins) {
    TrajectoryTree tree = build_tree(theta0, depth, p);
    DiscretizedDistribution w(bins);
    for (const auto& leaf : tree.leaves) w.pr[bin_index(leaf.theta, bins)] += leaf.weight;
    return w;
}

}  // namespace mq::oracle
