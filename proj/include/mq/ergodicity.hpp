#pragma once

#include <cstdint>
#include <vector>

#include "mq/core_maps.hpp"
#include "mq/markov.hpp"

namespace mq {

// Edge k -> i whenever entry (i, k) of the transition matrix exceeds the threshold.
struct TransitionGraph {
    std::size_t n = 0;
    std::vector<std::uint64_t> out_ptr;
    std::vector<std::uint32_t> out;

    std::size_t edge_count() const { return out.size(); }
    static TransitionGraph from_edges(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);
};

TransitionGraph build_graph(const SparseMarkov& m, double threshold = 0.0);

struct SccPartition {
    std::vector<std::uint32_t> component;           // node -> component id
    std::vector<std::vector<std::uint32_t>> members; // sorted; components ordered by smallest member
    std::size_t count() const { return members.size(); }
};

// Iterative Tarjan.
SccPartition strongly_connected_components(const TransitionGraph& g);

struct AngleInterval {
    double lo = 0.0;
    double hi = 0.0;
};
using AngleSet = std::vector<AngleInterval>;

// Component ids of the condensation leaves (no edges leaving the component).
std::vector<std::size_t> leaf_components(const TransitionGraph& g, const SccPartition& sccs);
std::vector<AngleSet> condensation_leaves(const TransitionGraph& g, const SccPartition& sccs);
AngleSet cells_to_intervals(const std::vector<std::uint32_t>& sorted_cells, std::size_t n);

bool phenomenological_nonergodicity(const SetupParams& p);

inline constexpr double kLocalizationBound = 1.0 - 1e-6;

// Largest sampled sum of |slopes| of both maps over the subset.
double max_slope_sum(const SetupParams& p, const AngleSet& subset, std::size_t samples = 64);
bool localization_condition(const SetupParams& p, const AngleSet& subset, std::size_t samples = 64);

struct ErgodicityReport {
    std::size_t n = 0;
    std::size_t scc_count = 0;
    bool ergodic = false;
    std::vector<AngleSet> leaf_subsets;  // empty when ergodic
    bool localized = false;              // every leaf satisfies the localization condition
};

ErgodicityReport analyze_ergodicity(const SetupParams& p, const SparseMarkov& m);

}  // namespace mq
