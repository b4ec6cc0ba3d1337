#include "mq/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mq {

TransitionGraph TransitionGraph::from_edges(std::size_t n,
                                            const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    TransitionGraph g;
    g.n = n;
    g.out_ptr.assign(n + 1, 0);
    for (auto [from, to] : edges) g.out_ptr[from + 1]++;
    for (std::size_t i = 0; i < n; ++i) g.out_ptr[i + 1] += g.out_ptr[i];
    g.out.resize(edges.size());
    std::vector<std::uint64_t> fill(g.out_ptr.begin(), g.out_ptr.end() - 1);
    for (auto [from, to] : edges) g.out[fill[from]++] = to;
    return g;
}

TransitionGraph build_graph(const SparseMarkov& m, double threshold) {
    TransitionGraph g;
    g.n = m.n;
    g.out_ptr.assign(m.n + 1, 0);
    for (std::size_t j = 0; j < m.nnz(); ++j)
        if (m.val[j] > threshold) g.out_ptr[m.col[j] + 1]++;
    for (std::size_t k = 0; k < m.n; ++k) g.out_ptr[k + 1] += g.out_ptr[k];
    g.out.resize(g.out_ptr.back());
    std::vector<std::uint64_t> fill(g.out_ptr.begin(), g.out_ptr.end() - 1);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::uint64_t j = m.row_ptr[i]; j < m.row_ptr[i + 1]; ++j)
            if (m.val[j] > threshold) g.out[fill[m.col[j]]++] = static_cast<std::uint32_t>(i);
    return g;
}

SccPartition strongly_connected_components(const TransitionGraph& g) {
    constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = g.n;
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> call;  // node, next edge
    std::uint32_t next_index = 0, comp_count = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, g.out_ptr[root]});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, e] = call.back();
            if (e < g.out_ptr[v + 1]) {
                std::uint32_t w = g.out[e++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, g.out_ptr[w]});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comp_count;
                } while (w != done);
                ++comp_count;
            }
        }
    }

    // Renumber components by their smallest member.
    std::vector<std::uint32_t> remap(comp_count, kUnvisited);
    std::uint32_t next = 0;
    for (std::uint32_t v = 0; v < n; ++v)
        if (remap[comp[v]] == kUnvisited) remap[comp[v]] = next++;
    SccPartition p;
    p.component.resize(n);
    p.members.resize(comp_count);
    for (std::uint32_t v = 0; v < n; ++v) {
        p.component[v] = remap[comp[v]];
        p.members[p.component[v]].push_back(v);
    }
    return p;
}

std::vector<std::size_t> leaf_components(const TransitionGraph& g, const SccPartition& sccs) {
    std::vector<char> has_exit(sccs.count(), 0);
    for (std::size_t v = 0; v < g.n; ++v)
        for (std::uint64_t e = g.out_ptr[v]; e < g.out_ptr[v + 1]; ++e)
            if (sccs.component[g.out[e]] != sccs.component[v]) has_exit[sccs.component[v]] = 1;
    std::vector<std::size_t> leaves;
    for (std::size_t c = 0; c < sccs.count(); ++c)
        if (!has_exit[c]) leaves.push_back(c);
    return leaves;
}

AngleSet cells_to_intervals(const std::vector<std::uint32_t>& cells, std::size_t n) {
    const double dt = kTwoPi / static_cast<double>(n);
    AngleSet out;
    std::size_t i = 0;
    while (i < cells.size()) {
        std::size_t j = i;
        while (j + 1 < cells.size() && cells[j + 1] == cells[j] + 1) ++j;
        out.push_back({-kPi + cells[i] * dt, -kPi + (cells[j] + 1.0) * dt});
        i = j + 1;
    }
    return out;
}

std::vector<AngleSet> condensation_leaves(const TransitionGraph& g, const SccPartition& sccs) {
    std::vector<AngleSet> out;
    for (auto c : leaf_components(g, sccs)) out.push_back(cells_to_intervals(sccs.members[c], g.n));
    return out;
}

bool phenomenological_nonergodicity(const SetupParams& p) {
    KrausPair k = kraus_matrices(p);
    auto em = eigenangles(k.gc_minus);
    auto ep = eigenangles(k.gc_plus);
    if (!em || !ep) return false;
    double theta_minus = em->theta[em->dominant()];
    double theta_plus = ep->theta[ep->dominant()];
    double slope_plus = std::abs(gc_slope(k.gc_plus, theta_minus));
    double slope_minus = std::abs(gc_slope(k.gc_minus, theta_plus));
    return slope_plus < 1.0 && slope_minus < 1.0;
}

double max_slope_sum(const SetupParams& p, const AngleSet& subset, std::size_t samples) {
    KrausPair k = kraus_matrices(p);
    double worst = 0.0;
    for (const auto& iv : subset) {
        for (std::size_t j = 0; j <= samples + 1; ++j) {
            double theta = iv.lo + (iv.hi - iv.lo) * static_cast<double>(j) / static_cast<double>(samples + 1);
            double s = std::abs(gc_slope(k.gc_minus, theta)) + std::abs(gc_slope(k.gc_plus, theta));
            if (!(s <= worst)) worst = s;  // NaN propagates as a failure
        }
    }
    return worst;
}

bool localization_condition(const SetupParams& p, const AngleSet& subset, std::size_t samples) {
    if (subset.empty()) return false;
    return max_slope_sum(p, subset, samples) <= kLocalizationBound;
}

ErgodicityReport analyze_ergodicity(const SetupParams& p, const SparseMarkov& m) {
    TransitionGraph g = build_graph(m);
    SccPartition sccs = strongly_connected_components(g);
    ErgodicityReport r;
    r.n = m.n;
    r.scc_count = sccs.count();
    r.ergodic = r.scc_count == 1;
    if (!r.ergodic) {
        r.leaf_subsets = condensation_leaves(g, sccs);
        r.localized = !r.leaf_subsets.empty();
        for (const auto& leaf : r.leaf_subsets)
            if (!localization_condition(p, leaf)) r.localized = false;
    }
    return r;
}

}  // namespace mq
