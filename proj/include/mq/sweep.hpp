#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mq/ergodicity.hpp"
#include "mq/indicators.hpp"
#include "mq/markov.hpp"
#include "mq/special_cases.hpp"

namespace mq {

enum class SweepMode { Me, Mc, Both };

SweepMode parse_mode(const std::string& s);
std::string to_string(SweepMode m);

struct SweepConfig {
    double gamma = 1.0;
    double m_lo = 0.125, m_hi = 5.0;
    std::size_t m_count = 40;
    double t_lo = 0.125, t_hi = 5.0;
    std::size_t t_count = 40;
    std::size_t cells = 10000;
    std::uint64_t mc_steps = 1000000;
    std::uint64_t mc_burn_in = 1000;
    std::size_t me_max_iters = kDefaultMaxIters;
    std::uint64_t seed = 1;
    std::string output;            // JSON-lines path
    std::string distribution_dir;  // sidecar CSVs when non-empty
    SweepMode mode = SweepMode::Me;
    double margin = 0.02;
    bool eigen_gap = false;
    double mc_theta0 = 0.3;

    void validate() const;  // throws InvalidArgument
};

struct McSummary {
    std::uint64_t steps = 0;
    std::uint64_t clicks = 0;
    std::optional<double> chi2_vs_me;
};

struct GridPointResult {
    std::uint64_t index = 0;
    double M = 0.0, T = 0.0;
    SpecialCaseTag tag;
    LineDistances lines;
    bool near_special = false;
    std::vector<std::string> warnings;
    bool failed = false;
    std::string error;
    std::string path;  // me, mc, projective_series, double_projective, period2, gamma_zero
    std::optional<SolveReport> solve;
    IndicatorRecord indicators;
    std::optional<ErgodicityReport> ergodicity;
    std::string ergodicity_reason;
    std::optional<McSummary> mc;
    std::string distribution_file;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

GridPointResult run_point(double M, double T, const SweepConfig& cfg, std::uint64_t index = 0,
                          DiscretizedDistribution* distribution_out = nullptr);

std::string to_json(const GridPointResult& r);
std::string key_of(double M, double T);

struct SweepSummary {
    std::size_t computed = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
};

using PointSink = std::function<void(const GridPointResult&)>;

// Evaluates (M, T) pairs in parallel, appending missing keys to cfg.output in
// list order. Existing lines with matching keys are kept and skipped.
SweepSummary run_points(const std::vector<std::pair<double, double>>& points, const SweepConfig& cfg,
                        const PointSink& sink = {});
SweepSummary run_cross_section(double M, const std::vector<double>& T, const SweepConfig& cfg,
                               const PointSink& sink = {});
SweepSummary run_grid(const SweepConfig& cfg, const PointSink& sink = {});

struct OverlayPoint {
    std::string curve;  // frozen, shift, period2, projective_minus, projective_plus
    int order = 0;
    double M = 0.0, T = 0.0;
};

std::vector<OverlayPoint> overlay_curves(const SweepConfig& cfg, std::size_t m_samples = 200);
void write_overlay(const std::string& path, const std::vector<OverlayPoint>& pts);

}  // namespace mq
