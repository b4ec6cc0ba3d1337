#include "mq/trajectory.hpp"

#include <cmath>

#include "mq/errors.hpp"
#include "mq/parallel.hpp"

namespace mq {

TrajectoryResult simulate(const TrajectoryConfig& cfg, const SetupParams& p) {
    if (cfg.burn_in >= cfg.n_steps) throw InvalidArgument("burn-in must be shorter than the run");
    if (cfg.bins < 2) throw InvalidArgument("histogram needs at least two bins");
    const KrausPair k = kraus_matrices(p);
    const Mat2& mp = k.m_plus;
    const Mat2& mm = k.m_minus;
    Rng rng(cfg.seed);

    TrajectoryResult res;
    std::vector<std::uint64_t> counts(cfg.bins, 0);
    cplx a = cfg.initial_state.alpha, b = cfg.initial_state.beta;
    {
        double n = std::sqrt(std::norm(a) + std::norm(b));
        a /= n;
        b /= n;
    }
    for (std::uint64_t step = 0; step < cfg.n_steps; ++step) {
        cplx pa = mp[0][0] * a + mp[0][1] * b;
        cplx pb = mp[1][0] * a + mp[1][1] * b;
        double p_plus = std::norm(pa) + std::norm(pb);
        double q = rng.uniform();
        double prob;
        if (q <= p_plus) {
            a = pa;
            b = pb;
            prob = p_plus;
            ++res.clicks;
        } else {
            cplx ma = mm[0][0] * a + mm[0][1] * b;
            b = mm[1][0] * a + mm[1][1] * b;
            a = ma;
            prob = std::norm(a) + std::norm(b);
            ++res.no_clicks;
        }
        double inv = 1.0 / std::sqrt(prob);
        a *= inv;
        b *= inv;
        if (step >= cfg.burn_in) counts[bin_index(BlochState{a, b}.gc_theta(), cfg.bins)]++;
        if (cfg.deviation_stride > 0 && (step + 1) % cfg.deviation_stride == 0)
            res.gc_deviation_series.push_back(gc_deviation({a, b}));
    }
    res.final_state = fix_phase({a, b});
    res.histogram = DiscretizedDistribution(cfg.bins);
    const double samples = static_cast<double>(cfg.n_steps - cfg.burn_in);
    for (std::size_t i = 0; i < cfg.bins; ++i) res.histogram.pr[i] = static_cast<double>(counts[i]) / samples;
    return res;
}

EnsembleResult simulate_ensemble(const TrajectoryConfig& cfg, const SetupParams& p, std::size_t trajectories) {
    std::vector<TrajectoryResult> results(trajectories);
    parallel_chunks(trajectories, thread_count(), [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            TrajectoryConfig c = cfg;
            c.seed = cfg.seed ^ static_cast<std::uint64_t>(t);
            results[t] = simulate(c, p);
        }
    });
    EnsembleResult e;
    e.histogram = DiscretizedDistribution(cfg.bins);
    for (const auto& r : results) {
        for (std::size_t i = 0; i < cfg.bins; ++i) e.histogram.pr[i] += r.histogram.pr[i];
        e.final_states.push_back(r.final_state);
        e.clicks += r.clicks;
        e.no_clicks += r.no_clicks;
    }
    for (auto& x : e.histogram.pr) x /= static_cast<double>(trajectories);
    return e;
}

double gc_deviation(const BlochState& s) {
    // The poles lie on the Grand Circle whatever phi says.
    if (std::min(std::abs(s.alpha), std::abs(s.beta)) < 1e-15 * std::sqrt(s.norm2())) return 0.0;
    double phi = s.phi();
    return std::min(std::abs(phi - kPi / 2.0), std::abs(phi + kPi / 2.0));
}

namespace {

bool eigenvectors_on_gc(const Mat2& m) {
    EigenData e = eigen2(m);
    for (const auto& v : e.vectors) {
        double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
        if (!(n > 0.0)) return false;
        BlochState s = fix_phase({v[0] / n, v[1] / n});
        if (std::abs(s.beta.real()) > kGcEigenvectorTolerance) return false;
    }
    return true;
}

}  // namespace

std::optional<std::size_t> gc_attraction_scan(const SetupParams& p, std::size_t k_max) {
    const KrausPair k = kraus_matrices(p);
    Mat2 prod = k.m_minus;
    for (std::size_t power = 0; power <= k_max; ++power) {
        if (eigenvectors_on_gc(prod)) return power;
        prod = matmul(k.m_plus, prod);
        double big = 0.0;
        for (const auto& row : prod)
            for (const auto& x : row) big = std::max(big, std::abs(x));
        if (!(big > 0.0)) return std::nullopt;
        for (auto& row : prod)
            for (auto& x : row) x /= big;
    }
    return std::nullopt;
}

}  // namespace mq
