#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mq/distribution.hpp"

namespace mq {

double participation_ratio(const DiscretizedDistribution& w);

// Grid levels N/2^k, k = 1..6, keeping those that divide N. When fewer than
// four remain, falls back to every divisor of N in [N/64, N/2].
std::vector<std::size_t> default_pr_grids(std::size_t n);

struct ZetaFit {
    double zeta = 0.0;       // clamped to [0, 1]
    double raw_slope = 0.0;
    bool clamped = false;    // raw slope outside [-0.05, 1.05]
    double residual = 0.0;   // RMS of log-fit residuals
    std::vector<std::size_t> levels;
};

// Throws TooFewLevels for fewer than 4 grids, IndivisibleGrid if a grid does not divide N.
ZetaFit pr_scaling_exponent(const DiscretizedDistribution& w, const std::vector<std::size_t>& grids);
ZetaFit pr_scaling_exponent(const DiscretizedDistribution& w);

double support_fraction(const DiscretizedDistribution& w, double c);

struct HeightResult {
    int category = 3;
    double h_max = 0.0;
    double h_0 = 0.0;
    double delta_h = 0.0;
    bool degenerate = false;  // constant distribution
};

HeightResult height_category(const DiscretizedDistribution& w, std::size_t n_h = 100);

struct BoxFit {
    double d = 1.0;
    double residual = 0.0;
    std::vector<std::size_t> m_values;
    std::vector<double> counts;
};

// Box sizes 1/m for m = m_min, 2 m_min, ... <= m_max (default N/16).
BoxFit box_counting_dimension(const DiscretizedDistribution& w, std::size_t m_min = 16, std::size_t m_max = 0);
// Number of boxes of side 1/m covering the rescaled polyline.
double box_count(const DiscretizedDistribution& w, std::size_t m);

// Throws GridMismatch for differing sizes.
double chi2_distance(const DiscretizedDistribution& p, const DiscretizedDistribution& q);

template <typename T>
struct Maybe {
    std::optional<T> value;
    std::string reason;  // set when value is empty
};

struct IndicatorRecord {
    Maybe<double> pr;
    Maybe<double> zeta;
    Maybe<double> support;
    Maybe<int> category;
    Maybe<double> h_max;
    Maybe<double> h_0;
    Maybe<double> fractal_dim;
    Maybe<double> chi2;
    std::optional<ZetaFit> zeta_fit;
    std::optional<BoxFit> box_fit;
};

inline constexpr double kSupportMass = 0.99;

IndicatorRecord compute_indicators(const DiscretizedDistribution& w,
                                   const DiscretizedDistribution* reference = nullptr);

}  // namespace mq
