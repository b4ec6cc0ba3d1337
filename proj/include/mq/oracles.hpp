#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mq/core_maps.hpp"
#include "mq/distribution.hpp"

namespace mq::oracle {

// Amplitudes over |1,0>|+>, |1,0>|->, |0,1>|+>, |0,1>|->.
using SetupState4 = std::array<cplx, 4>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;

using Real4 = std::array<std::array<double, 4>, 4>;

Real4 hamiltonian(const SetupParams& p);

// Eigendecomposition of a real symmetric matrix; returns eigenvalues,
// eigenvectors in the columns of v.
std::array<double, 4> symmetric_eigen(Real4 a, Real4& v);

// exp(-i H T) through the eigendecomposition of the real symmetric H.
Mat4 evolution(const SetupParams& p);

SetupState4 prepare(const BlochState& s);  // detector in |->
SetupState4 evolve(const SetupState4& s, const Mat4& u);
// Projects the detector onto outcome mu; returns unnormalized system amplitudes.
std::array<cplx, 2> project(const SetupState4& s, Outcome mu);

KrausPair kraus_from_hamiltonian(const SetupParams& p);

struct TreeLeaf {
    std::uint32_t bits = 0;  // bit i set: click at step i
    double theta = 0.0;
    double weight = 0.0;
    BlochState state;
};

struct TrajectoryTree {
    int depth = 0;
    std::vector<TreeLeaf> leaves;  // ordered by bitstring value
};

inline constexpr int kMaxTreeDepth = 16;

TrajectoryTree build_tree(double theta0, int depth, const SetupParams& p);
DiscretizedDistribution enumerate_tree(double theta0, int depth, const SetupParams& p, std::size_t bins);

}  // namespace mq::oracle
