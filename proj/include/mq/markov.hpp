#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mq/core_maps.hpp"
#include "mq/distribution.hpp"

namespace mq {

// Column-stochastic transition matrix of the discretized master equation in
// CSR layout: row i holds the cells k feeding cell i.
struct SparseMarkov {
    std::size_t n = 0;
    std::vector<std::uint64_t> row_ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }
    double delta_theta() const { return kTwoPi / static_cast<double>(n); }
    void multiply(const double* x, double* y) const;
    std::vector<double> column_sums() const;
    static SparseMarkov from_dense(const std::vector<std::vector<double>>& dense);
};

struct BuildOptions {
    // Samples interior points of each cell to verify the preimage arc is monotone.
    bool check_monotone = false;
};

SparseMarkov build_markov(const SetupParams& p, std::size_t n, const BuildOptions& opt = {});

struct SolveReport {
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
    bool cycling = false;  // period-2 oscillation detected at exit
    double eigen_gap = -1.0;  // negative when not estimated
};

struct SolveResult {
    DiscretizedDistribution w;
    SolveReport report;
};

inline constexpr std::size_t kDefaultMaxIters = 10000;

// tol <= 0 selects the default 1e-12 * N on the L1 residual.
SolveResult power_iterate(const SparseMarkov& m, const DiscretizedDistribution& init,
                          std::size_t max_iters = kDefaultMaxIters, double tol = -1.0);

struct GapEstimate {
    double gap = 0.0;  // 1 - |lambda_2|
    std::size_t iterations = 0;
};

GapEstimate eigen_gap(const SparseMarkov& m, const DiscretizedDistribution& stationary, std::size_t iters = 200);

DiscretizedDistribution propagate(const SparseMarkov& m, const DiscretizedDistribution& w0, std::size_t steps);

DiscretizedDistribution coarse_grain(const DiscretizedDistribution& w, std::size_t n_g);

// Binary dump: "MQME", u32 version, u64 N, then u64 row_ptr[N+1],
// u32 col[nnz], f64 val[nnz]; little-endian.
inline constexpr std::uint32_t kMqmeVersion = 1;
void write_mqme(std::ostream& os, const SparseMarkov& m);
void write_mqme(const std::string& path, const SparseMarkov& m);
SparseMarkov read_mqme(std::istream& is);
SparseMarkov read_mqme(const std::string& path);

}  // namespace mq
