#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mq/core_maps.hpp"
#include "mq/distribution.hpp"

namespace mq {

enum class SpecialKind { GammaZero, Frozen, Shift, Period2, ProjectiveMinus, ProjectivePlus, DoubleProjective, Generic };

std::string to_string(SpecialKind k);

// Phase distances to each exactly solvable condition.
struct SpecialDistances {
    double frozen = 0.0;    // |YT - 2 pi q|
    double shift = 0.0;     // |MT - q pi|
    double period2 = 0.0;   // |YT - (2l+1) pi|
    double det_minus = 0.0; // |det M-|
    double det_plus = 0.0;  // |det M+|
    int frozen_q = 0, shift_q = 0, period2_l = 0;
};

struct SpecialCaseTag {
    SpecialKind kind = SpecialKind::Generic;
    int order = 0;          // q or l where applicable
    double distance = 0.0;  // distance for the reported kind
    SpecialDistances all;
};

inline constexpr double kClassifyTolerance = 1e-9;

SpecialDistances special_distances(const SetupParams& p);
SpecialCaseTag classify(const SetupParams& p, double tol = kClassifyTolerance);

// Distances along T at fixed M to the nearest special line; projective
// distances use a first-order estimate |det| / |d det/dT|.
struct LineDistances {
    double frozen = 0.0, shift = 0.0, period2 = 0.0, projective_minus = 0.0, projective_plus = 0.0;
    double nearest() const;
    SpecialKind nearest_kind() const;
};
LineDistances line_distances(const SetupParams& p);

struct Peak {
    double theta = 0.0;
    double weight = 0.0;
};

struct AnalyticADF {
    std::vector<Peak> peaks;
    bool preserves_initial = false;  // the distribution stays at the initial angle
    double tail_mass = 0.0;          // bound on mass dropped by truncation
    double cross_probability = -1.0; // double-projective escape probability
};

DiscretizedDistribution bin_peaks(const AnalyticADF& adf, std::size_t bins);

// gamma = 0. MT is needed only to detect the trivial MT = pi l case.
AnalyticADF gamma_zero_adf(double theta0, double MT);
double null_probability(double theta0, double MT, std::uint64_t L);

AnalyticADF period2_adf();
DiscretizedDistribution period2_binomial_distribution(std::uint64_t n_t, double theta0, const SetupParams& p,
                                                      std::size_t bins);

AnalyticADF projective_series(const SetupParams& p, std::size_t n_terms = 20);
DiscretizedDistribution projective_series_adf(const SetupParams& p, std::size_t n_terms, std::size_t bins);

AnalyticADF double_projective_adf(const SetupParams& p);

struct ShiftProperties {
    double phi = 0.0;  // half-angle rotation per application, in [0, pi)
    bool commensurate = false;
    int numerator = 0, denominator = 0;  // phi/pi when commensurate
    Outcome shifting = Outcome::Plus;    // which map rotates
};
ShiftProperties shift_properties(const SetupParams& p);

// Best rational p/q with q <= max_den approximating x within tol, via continued fractions.
bool rational_approximation(double x, int max_den, double tol, int& num, int& den);

// Root finders used to place parameters exactly on special curves.
double find_projective_T(double M, Outcome mu, double t_lo, double t_hi, double gamma = 1.0);
// On MT = pi/2 + pi l, bisects M in [m_lo, m_hi] for the second determinant condition.
SetupParams find_double_projective(int l, double m_lo, double m_hi, double gamma = 1.0);

}  // namespace mq
